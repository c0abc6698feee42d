#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "lss/error.hpp"
#include "lss/model.hpp"
#include "lss/oracle.hpp"

using namespace lss;

TEST_CASE("dense eigensolver small cases") {
  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 3, -1, 2, 0;
  const auto e = oracle::dense_eig(d);
  CHECK(e.values[0] == -1.0);
  CHECK(e.values[3] == 3.0);
  CHECK((e.vectors.cwiseAbs().colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);

  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto s = oracle::dense_eig(x);
  CHECK(s.values[0] == doctest::Approx(-1.0));
  CHECK(s.values[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(oracle::dense_eig(Matrix::Zero(10, 10), false, 5), InputError);
  CHECK(oracle::dense_eig(Matrix::Zero(0, 0)).values.size() == 0);
}

TEST_CASE("dense eigensolver matches the periodic laplacian spectrum") {
  const Index n = 64;
  const double h = 0.5;
  const Matrix a = test::laplacian_1d(n, true).to_dense() / (h * h);
  const auto e = oracle::dense_eig(a);
  std::vector<double> ref;
  for (Index k = 0; k < n; ++k) ref.push_back((2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n)) / (h * h));
  std::sort(ref.begin(), ref.end());
  for (Index k = 0; k < n; ++k) CHECK(e.values[k] == doctest::Approx(ref[k]).scale(16).epsilon(1e-13));
  const Matrix ortho = e.vectors.transpose() * e.vectors - Matrix::Identity(n, n);
  CHECK(ortho.cwiseAbs().maxCoeff() < 1e-13);
  const Matrix recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a;
  CHECK(recon.cwiseAbs().maxCoeff() < 1e-12 * 16);
}

TEST_CASE("dense eigensolver agrees with an independent solver") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Matrix a = test::random_sparse(80, 0.2, seed).to_dense();
    const Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
    const auto e = oracle::dense_eig(a, false);
    CHECK((e.values - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exact lss operator") {
  const Matrix z = Matrix::Zero(5, 5);
  const Matrix f = oracle::exact_lss_operator(z, 0.7, 0.5);
  CHECK((f - std::exp(-0.49 / 0.25) * Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-15);

  const Matrix a = test::random_sparse(30, 0.2, 9).to_dense();
  CHECK((oracle::exact_lss_operator(a, 0.0, 1e6) - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-6);
  const Matrix g = oracle::exact_lss_operator(a, 0.3, 0.8);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("max norm error") {
  const Matrix a = test::random_matrix(4, 4, 1);
  CHECK(oracle::max_norm_error(a, a) == 0.0);
  Matrix b = a;
  b(2, 1) += 0.5;
  CHECK(oracle::max_norm_error(a, b) == doctest::Approx(0.5));
  CHECK_THROWS(oracle::max_norm_error(a, Matrix::Zero(3, 3)));
}

TEST_CASE("eigenvalues in a window") {
  Matrix d = Matrix::Zero(10, 10);
  for (Index i = 0; i < 10; ++i) d(i, i) = static_cast<double>(10 - i);
  const Vector w = oracle::eigs_in_window(d, 2.5, 5.5);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == 3.0);
  CHECK(w[2] == 5.0);
  CHECK(oracle::eigs_in_window(d, 3.0, 4.0).size() == 0);
}

TEST_CASE("ritz comparison") {
  Vector ref(3), ritz(3);
  ref << 1.0, 2.0, 3.0;
  ritz << 1.1, 1.9, 3.0;
  auto c = oracle::compare_ritz(ref, ritz);
  CHECK(c.count_match);
  CHECK(c.max_pair_error == doctest::Approx(0.1));
  Vector extra(4);
  extra << 1.0, 2.0, 2.4, 3.0;
  Vector all(4);
  all << 0.5, 1.0, 2.0, 3.0;
  c = oracle::compare_ritz(ref, extra, all);
  CHECK_FALSE(c.count_match);
  CHECK(c.ritz_count == 4);
  CHECK(c.max_nearest_error == doctest::Approx(0.4));
}

TEST_CASE("reference count for the default 1d realization") {
  const auto a = generate_1d(test::model_1d());
  const auto e = oracle::dense_eig(a.to_dense(), false);
  CHECK(e.values[0] == doctest::Approx(-5.22).epsilon(1e-2));
  // 24 for the published realization; this seed has 22
  CHECK(oracle::eigs_in_window(e, 1.5, 2.5).size() == 22);
}
