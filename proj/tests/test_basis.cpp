#include <doctest.h>

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "helpers.hpp"
#include "lss/error.hpp"
#include "lss/lss_basis.hpp"
#include "lss/model.hpp"
#include "lss/oracle.hpp"
#include "lss/partition.hpp"
#include "lss/serial.hpp"

using namespace lss;

namespace {

const SparseHermitian& model_matrix() {
  static const SparseHermitian a = generate_1d(test::model_1d());
  return a;
}

SliceParams params(double tau, double mu = 2.0) {
  SliceParams p;
  p.mu = mu;
  p.sigma = 1.0;
  p.tau = tau;
  return p;
}

}  // namespace

TEST_CASE("slice parameters are validated") {
  SliceParams p;
  CHECK_NOTHROW(p.validate());
  p.sigma = 0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.tau = -0.1;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.c_window = 0.5;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.c_window = std::numeric_limits<double>::infinity();
  CHECK_NOTHROW(p.validate());
  CHECK(std::isinf(p.window_lo()));
}

TEST_CASE("local partial eigendecomposition") {
  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 1, 2, 3, 4;
  const LocalEig e = local_partial_eig_dense(d, 1.5, 3.5);
  REQUIRE(e.values.size() == 2);
  CHECK(e.values[0] == doctest::Approx(2.0));
  CHECK(e.values[1] == doctest::Approx(3.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
  CHECK(local_partial_eig_dense(d, 5.0, 6.0).values.size() == 0);
  CHECK(local_partial_eig_dense(d, 2.0, 3.0).values.size() == 0);

  const Partition p = partition_structured_1d(1600, 8);
  const SparseHermitian ak = extract_submatrix(model_matrix(), p.extended[2]);
  REQUIRE(ak.size() == 600);
  const auto ref = oracle::eigs_in_window(ak.to_dense(), -1.0, 5.0);
  SliceParams sp = params(0.1);
  sp.solver = LocalSolver::dense;
  const LocalEig dense = local_partial_eig(ak, sp);
  REQUIRE(dense.values.size() == ref.size());
  CHECK((dense.values - ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((dense.vectors.transpose() * dense.vectors - Matrix::Identity(ref.size(), ref.size())).cwiseAbs().maxCoeff() < 1e-12);

  sp.solver = LocalSolver::iterative;
  sp.iter_block = 16;
  const LocalEig it = local_partial_eig(ak, sp);
  CHECK(it.iterative);
  REQUIRE(it.values.size() == ref.size());
  CHECK((it.values - ref).cwiseAbs().maxCoeff() < 1e-9);
  // same invariant subspace
  const Matrix overlap = dense.vectors.transpose() * it.vectors;
  const Eigen::JacobiSVD<Matrix> svd(overlap);
  CHECK(svd.singularValues().minCoeff() > 1 - 1e-8);
}

TEST_CASE("gaussian filter") {
  Vector d(4);
  d << 2.0, 3.0, 1.0, 5.0;
  const Vector f = gaussian_filter(d, 2.0, 1.0);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(f[2] == f[1]);
  CHECK(f[3] == doctest::Approx(1.2340980408667956e-4).epsilon(1e-14));
}

TEST_CASE("truncated svd") {
  const Matrix w = test::random_matrix(20, 50, 4);
  const TruncatedSvd full = local_svd_truncate(w, 0.0);
  CHECK(full.kept == 20);
  CHECK((full.u * full.vt - w).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((full.u.transpose() * full.u - Matrix::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix r1 = test::random_matrix(6, 1, 5) * test::random_matrix(1, 9, 6);
  CHECK(local_svd_truncate(r1, 0.5).kept == 1);

  const TruncatedSvd t = local_svd_truncate(w, 0.1);
  const Eigen::JacobiSVD<Matrix> ref(w);
  const Vector s = ref.singularValues();
  CHECK((t.singular_values - s).cwiseAbs().maxCoeff() < 1e-12 * s[0]);
  Index expect = 0;
  while (expect < s.size() && s[expect] > 0.1 * s[0]) ++expect;
  CHECK(t.kept == expect);
  CHECK(t.tau_abs == doctest::Approx(0.1 * s[0]));
  const Eigen::JacobiSVD<Matrix> err(w - t.u * t.vt);
  CHECK(err.singularValues()[0] <= 0.1 * s[0]);

  const TruncatedSvd z = local_svd_truncate(Matrix::Zero(3, 4), 0.1);
  CHECK(z.kept == 0);
}

TEST_CASE("element basis on a diagonal matrix") {
  Matrix d = Matrix::Zero(5, 5);
  d.diagonal() << 0, 1, 2, 3, 4;
  const auto ak = SparseHermitian::from_dense(d);
  SliceParams sp = params(0.5);
  const ElementBasis eb = build_element_basis(ak, IndexSet::range(0, 5), IndexSet::range(0, 5), sp, 0);
  REQUIRE(eb.t == 1);
  CHECK(eb.u(2, 0) == doctest::Approx(1.0));
  CHECK(eb.u.col(0).cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK(eb.s == 5);
}

TEST_CASE("element basis invariants on the 1d model") {
  const Partition p = partition_structured_1d(1600, 8);
  const SparseHermitian ak = extract_submatrix(model_matrix(), p.extended[2]);
  Index prev = std::numeric_limits<Index>::max();
  for (double tau : {1e-3, 1e-2, 1e-1}) {
    const ElementBasis eb = build_element_basis(ak, p.elements[2], p.extended[2], params(tau), 2);
    CHECK(eb.t <= eb.s);
    CHECK(eb.s <= 600);
    CHECK(eb.t < prev);
    prev = eb.t;
    CHECK(eb.u.rows() == 600);
    CHECK((eb.u.transpose() * eb.u - Matrix::Identity(eb.t, eb.t)).cwiseAbs().maxCoeff() < 1e-12);
    const double smax = eb.singular_values[0];
    for (Index k = 0; k < eb.t; ++k) CHECK(eb.singular_values[k] > tau * smax);
    CHECK(eb.tau_abs == doctest::Approx(tau * smax));
    CHECK(eb.v.rows() == eb.t);
    CHECK(eb.v.cols() == 200);
  }
  // localized: weight near the ends of Q is small compared with the middle
  const ElementBasis eb = build_element_basis(ak, p.elements[2], p.extended[2], params(0.1), 2);
  const Vector rows = eb.u.rowwise().norm();
  const double edge = std::max(rows.head(20).maxCoeff(), rows.tail(20).maxCoeff());
  CHECK(edge < 0.05 * rows.segment(200, 200).maxCoeff());
}

TEST_CASE("basis size grows as tau decreases") {
  const Partition p = partition_structured_1d(1600, 8);
  const LssBasis b1 = build_lss_basis(model_matrix(), p, params(0.1));
  const LssBasis b3 = build_lss_basis(model_matrix(), p, params(0.001));
  // 87 to 173 in the published realization
  CHECK(b1.n_b == 86);
  CHECK(b3.n_b == 173);
  CHECK(b1.offsets.size() == 9);
  CHECK(b1.offsets.back() == b1.n_b);
  CHECK(b1.max_tau_abs > 0);
}

TEST_CASE("single element reproduces the global filtered space") {
  const auto a = generate_1d(test::model_1d(1, 3));
  const Partition p = partition_structured_1d(a.size(), 1);
  SliceParams sp = params(0.0, 2.0);
  const LssBasis b = build_lss_basis(a, p, sp);
  const auto eig = oracle::dense_eig(a.to_dense());
  std::vector<Index> inside;
  for (Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] > sp.window_lo() && eig.values[k] < sp.window_hi()) inside.push_back(k);
  }
  REQUIRE(b.n_b == static_cast<Index>(inside.size()));
  Matrix x(a.size(), static_cast<Index>(inside.size()));
  for (std::size_t k = 0; k < inside.size(); ++k) x.col(static_cast<Index>(k)) = eig.vectors.col(inside[k]);
  const Matrix& u = b.elements[0].u;
  CHECK((u * u.transpose() - x * x.transpose()).cwiseAbs().maxCoeff() < 1e-10);

  SliceParams all = sp;
  all.c_window = std::numeric_limits<double>::infinity();
  const LssBasis bf = build_lss_basis(a, p, all);
  const Matrix f = oracle::apply_function_gaussian(eig, sp.mu, sp.sigma);
  const Matrix approx = Matrix(assemble_approx_operator(bf, p));
  CHECK((approx - f).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("serial and parallel basis builds agree bitwise") {
  const Partition p = partition_structured_1d(1600, 8);
  const LssBasis par = build_lss_basis(model_matrix(), p, params(0.032));
  const LssBasis ser = serial::build_lss_basis(model_matrix(), p, params(0.032));
  REQUIRE(par.n_b == ser.n_b);
  for (std::size_t k = 0; k < par.elements.size(); ++k) {
    CHECK(par.elements[k].u == ser.elements[k].u);
    CHECK(par.elements[k].v == ser.elements[k].v);
  }
}

TEST_CASE("permuted input gives the same basis size") {
  const auto a = generate_1d(test::model_1d(2, 1));
  const Partition p = partition_structured_1d(a.size(), 4);
  const auto perm = test::random_permutation(a.size(), 9);
  const LssBasis b = build_lss_basis(a, p, params(0.05));
  const LssBasis q = build_lss_basis(a.permuted(perm), permuted(p, perm), params(0.05));
  CHECK(b.n_b == q.n_b);
  for (std::size_t k = 0; k < b.elements.size(); ++k) {
    const Vector& s1 = b.elements[k].singular_values;
    const Vector& s2 = q.elements[k].singular_values;
    CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("elements with no local eigenvalues in the window are reported") {
  Matrix d = Matrix::Zero(6, 6);
  d.diagonal() << 0, 0.1, 0.2, 10, 10.1, 10.2;
  const auto a = SparseHermitian::from_dense(d);
  const std::vector<Index> xi = {0, 0, 0, 1, 1, 1};
  const Partition p = partition_from_map(a, xi);
  const LssBasis b = build_lss_basis(a, p, params(0.0, 0.1));
  CHECK(b.empty_elements == std::vector<Index>{1});
  CHECK(b.n_b == 3);
}
