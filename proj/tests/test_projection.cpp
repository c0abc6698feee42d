#include <doctest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "lss/error.hpp"
#include "lss/model.hpp"
#include "lss/oracle.hpp"
#include "lss/pipeline.hpp"
#include "lss/projection.hpp"
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
  p.tau = tau;
  return p;
}

Matrix dense_u(const LssBasis& b, const Partition& p) {
  Matrix u = Matrix::Zero(p.n, b.n_b);
  for (std::size_t k = 0; k < b.elements.size(); ++k) {
    const auto& q = p.extended[k];
    for (Index r = 0; r < q.size(); ++r) {
      u.block(q[r], b.offsets[k], 1, b.elements[k].t) = b.elements[k].u.row(r);
    }
  }
  return u;
}

}  // namespace

TEST_CASE("single element pencil is the orthonormal projection") {
  const auto a = generate_1d(test::model_1d(1, 2));
  const Partition p = partition_structured_1d(a.size(), 1);
  const LssBasis b = build_lss_basis(a, p, params(0.0));
  const ProjectedPencil pen = assemble_pencil(a, p, b);
  CHECK(pen.block_count() == 1);
  CHECK((pen.dense_b() - Matrix::Identity(b.n_b, b.n_b)).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix u = dense_u(b, p);
  CHECK((pen.dense_a() - u.transpose() * a.to_dense() * u).cwiseAbs().maxCoeff() < 1e-10);

  const PencilSolution sol = solve_pencil(pen);
  const std::vector<double> r = residual_norms_local(pen, b, p, sol.c, sol.theta);
  for (double v : r) CHECK(v < 1e-10);
  const auto eig = oracle::dense_eig(a.to_dense(), false);
  const Vector ref = oracle::eigs_in_window(eig, 1.5, 2.5);
  const auto win = select_window(sol.theta, 1.5, 2.5);
  REQUIRE(static_cast<Index>(win.size()) == ref.size());
  for (std::size_t k = 0; k < win.size(); ++k) CHECK(std::abs(sol.theta[win[k]] - ref[static_cast<Index>(k)]) < 1e-10);
}

TEST_CASE("block sparsity of the pencil") {
  const Partition p = partition_structured_1d(1600, 8);
  const LssBasis b = build_lss_basis(model_matrix(), p, params(0.1));
  const ProjectedPencil pen = assemble_pencil(model_matrix(), p, b);
  CHECK(pen.block_count() == 40);
  CHECK(pen.fill_fraction() == doctest::Approx(0.625).epsilon(0.02));

  const auto big = generate_1d(test::model_1d(32, 0));
  const Partition p32 = partition_structured_1d(big.size(), 32);
  const LssBasis b32 = build_lss_basis(big, p32, params(0.1));
  // 15.6% in the published run
  CHECK(assemble_pencil(big, p32, b32).fill_fraction() == doctest::Approx(5.0 / 32.0).epsilon(0.03));
}

TEST_CASE("disconnected elements do not couple") {
  Matrix m = Matrix::Zero(20, 20);
  m.topLeftCorner(10, 10) = test::laplacian_1d(10, true).to_dense();
  m.bottomRightCorner(10, 10) = test::laplacian_1d(10, true).to_dense();
  const auto a = SparseHermitian::from_dense(m);
  std::vector<Index> xi(20, 0);
  for (Index i = 10; i < 20; ++i) xi[i] = 1;
  const Partition p = partition_from_map(a, xi);
  const LssBasis b = build_lss_basis(a, p, params(0.0, 1.0));
  const ProjectedPencil pen = assemble_pencil(a, p, b);
  CHECK(pen.block_count() == 2);
  CHECK(pen.dense_a().block(0, b.offsets[1], b.offsets[1], b.n_b - b.offsets[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pencil solve") {
  Matrix a(2, 2), bm(2, 2);
  a << 1, 0, 0, 2;
  bm << 1, 0, 0, 4;
  const PencilSolution s = solve_pencil(a, bm);
  REQUIRE(s.theta.size() == 2);
  CHECK(s.theta[0] == doctest::Approx(0.5));
  CHECK(s.theta[1] == doctest::Approx(1.0));
  CHECK(s.condition == doctest::Approx(4.0));

  const Matrix h = test::random_sparse(12, 0.4, 2).to_dense();
  const PencilSolution id = solve_pencil(h, Matrix::Identity(12, 12));
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues();
  CHECK((id.theta - ev).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix g = test::random_matrix(30, 30, 3);
  const Matrix spd = g * g.transpose() + 0.5 * Matrix::Identity(30, 30);
  const Matrix sym = test::random_sparse(30, 0.5, 4).to_dense();
  const PencilSolution r = solve_pencil(sym, spd);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ref(sym, spd);
  CHECK((r.theta - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((r.c.transpose() * spd * r.c - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.dropped == 0);

  Matrix sing = Matrix::Zero(3, 3);
  sing.diagonal() << 1, 1, 1e-14;
  const PencilSolution d = solve_pencil(Matrix::Identity(3, 3), sing);
  CHECK(d.retained == 2);
  CHECK(d.dropped == 1);

  Matrix indef = Matrix::Identity(3, 3);
  indef(2, 2) = -0.5;
  CHECK_THROWS_AS(solve_pencil(Matrix::Identity(3, 3), indef), Error);
  CHECK_THROWS(solve_pencil(Matrix::Identity(3, 3), Matrix::Identity(2, 2)));
}

TEST_CASE("window selection") {
  Vector t(3);
  t << 1, 2, 3;
  CHECK(select_window(t, 1.5, 2.5) == std::vector<Index>{1});
  CHECK(select_window(t, 3.5, 4.0).empty());
  CHECK(select_window(t, 2.0, 3.0).empty());
}

TEST_CASE("spurious filter") {
  CHECK(filter_spurious(std::vector<double>(5, 0.3), 0.1, 20) == std::vector<bool>(5, false));
  std::vector<double> r(24, 1e-3);
  r.push_back(0.5);
  const auto f = filter_spurious(r, 0.1, 20);
  CHECK(std::count(f.begin(), f.end(), true) == 1);
  CHECK(f.back());
  CHECK(spurious_threshold(r, 0.1, 20) == doctest::Approx(0.1));
  CHECK(spurious_threshold(std::vector<double>(3, 0.05), 0.01, 20) == doctest::Approx(1.0));
  CHECK(filter_spurious({}, 0.1, 20).empty());
}

TEST_CASE("global residuals") {
  const auto a = SparseHermitian::from_dense(Matrix::Identity(6, 6));
  const Partition p = partition_structured_1d(6, 2);
  LssBasis b;
  b.elements.resize(2);
  for (Index k = 0; k < 2; ++k) {
    b.elements[k].kappa = k;
    b.elements[k].t = 1;
    b.elements[k].u = Matrix::Zero(p.extended[k].size(), 1);
    b.elements[k].u(0, 0) = 0.5;
  }
  finalize_offsets(b);
  Matrix c(2, 1);
  c << 1.0, 2.0;
  Vector th(1);
  th << 3.0;
  const Matrix x = expand_coefficients(b, p, c);
  const auto r = residual_norms_global(a, b, p, c, th);
  CHECK(r[0] == doctest::Approx(2.0 * x.col(0).norm()));
}

TEST_CASE("residuals on the 1d model") {
  const auto a = generate_1d(test::model_1d(2, 0));
  const Partition p = partition_structured_1d(a.size(), 4);
  SliceOptions o;
  o.params = params(0.032);
  const SliceRun run = run_slice(a, p, o);
  const auto& res = run.result;
  REQUIRE(!res.theta.empty());
  const Matrix x = expand_coefficients(run.basis, p, res.c);
  const Matrix ad = a.to_dense();
  for (Index j = 0; j < x.cols(); ++j) {
    const double r = (ad * x.col(j) - res.theta[static_cast<std::size_t>(j)] * x.col(j)).norm();
    CHECK(res.residual_global[static_cast<std::size_t>(j)] == doctest::Approx(r).epsilon(1e-9).scale(1e-12));
  }
  const auto sr = serial::residual_norms_global(a, run.basis, p, res.c, Eigen::Map<const Vector>(res.theta.data(), res.theta.size()));
  CHECK(sr == res.residual_global);
  const auto sl = serial::residual_norms_local(run.pencil, run.basis, p, res.c, Eigen::Map<const Vector>(res.theta.data(), res.theta.size()));
  CHECK(sl == res.residual_local);
}

TEST_CASE("local and global residuals agree on the default run") {
  const Partition p = partition_structured_1d(1600, 8);
  SliceOptions o;
  o.params = params(0.1);
  const SliceRun run = run_slice(model_matrix(), p, o);
  const auto& r = run.result;
  for (std::size_t k = 0; k < r.theta.size(); ++k) {
    if (r.spurious[k]) continue;
    CHECK(std::abs(r.residual_local[k] - r.residual_global[k]) < 0.1 * r.residual_global[k]);
  }
}

TEST_CASE("halo assembly is the exact projection") {
  const auto a = generate_1d(test::model_1d(2, 4));
  const Partition p = partition_structured_1d(a.size(), 4);
  const LssBasis b = build_lss_basis(a, p, params(0.05));
  const Matrix u = dense_u(b, p);
  const Matrix exact = u.transpose() * a.to_dense() * u;
  const ProjectedPencil halo = assemble_pencil(a, p, b, AssemblyMode::halo);
  const ProjectedPencil local = assemble_pencil(a, p, b, AssemblyMode::local);
  CHECK((halo.dense_a() - exact).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((local.dense_b() - u.transpose() * u).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((local.dense_a() - exact).cwiseAbs().maxCoeff() > 1e-8);
}

TEST_CASE("serial and parallel assembly agree bitwise") {
  const Partition p = partition_structured_1d(1600, 8);
  const LssBasis b = build_lss_basis(model_matrix(), p, params(0.032));
  for (AssemblyMode mode : {AssemblyMode::local, AssemblyMode::halo}) {
    const ProjectedPencil x = assemble_pencil(model_matrix(), p, b, mode);
    const ProjectedPencil y = serial::assemble_pencil(model_matrix(), p, b, mode);
    CHECK(x.dense_a() == y.dense_a());
    CHECK(x.dense_b() == y.dense_b());
  }
}

TEST_CASE("reconstructed eigenvectors") {
  // 200 sites per element; at 100 the local assembly loses accuracy
  const auto a = generate_1d(test::model_1d(4, 0));
  const Partition p = partition_structured_1d(a.size(), 4);
  SliceOptions o;
  o.params = params(0.032);
  const SliceRun run = run_slice(a, p, o);
  const Matrix x = reconstruct_eigenvectors(run.basis, p, run.result.c);
  const auto eig = oracle::dense_eig(a.to_dense());
  for (Index j = 0; j < x.cols(); ++j) {
    CHECK(x.col(j).norm() == doctest::Approx(1.0));
    if (run.result.spurious[static_cast<std::size_t>(j)]) continue;
    const double th = run.result.theta[static_cast<std::size_t>(j)];
    Index best = 0;
    for (Index k = 0; k < eig.values.size(); ++k) {
      if (std::abs(eig.values[k] - th) < std::abs(eig.values[best] - th)) best = k;
    }
    // skip near-degenerate pairs, which need subspace matching
    double gap = std::numeric_limits<double>::infinity();
    if (best > 0) gap = std::min(gap, eig.values[best] - eig.values[best - 1]);
    if (best + 1 < eig.values.size()) gap = std::min(gap, eig.values[best + 1] - eig.values[best]);
    if (gap < 1e-6) continue;
    CHECK(std::abs(x.col(j).dot(eig.vectors.col(best))) >= 0.99);
  }
  const Matrix g = x.transpose() * x;
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = i + 1; j < g.cols(); ++j) CHECK(std::abs(g(i, j)) <= 1e-2);
  }

  const Partition one = partition_structured_1d(a.size(), 1);
  const LssBasis b1 = build_lss_basis(a, one, params(0.0));
  Matrix c = Matrix::Zero(b1.n_b, 1);
  c(0, 0) = 1.0;
  CHECK((expand_coefficients(b1, one, c) - b1.elements[0].u.col(0)).cwiseAbs().maxCoeff() == 0.0);
}
