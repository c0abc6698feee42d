#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "lss/decay.hpp"
#include "lss/error.hpp"
#include "lss/oracle.hpp"

using namespace lss;

namespace {

// scaled copy of A with spectrum inside (-1, 1)
Matrix scaled(const SparseHermitian& a, SpectrumScaling& s) {
  s = SpectrumScaling::from_interval(gershgorin_interval(a));
  Matrix d = a.to_dense();
  d.diagonal().array() -= s.center;
  return d / s.radius;
}

}  // namespace

TEST_CASE("decay model constants") {
  const DecayModel m = DecayModel::make(1.0, 0.0, 1.0);
  CHECK(m.rho == 0.5);
  CHECK(m.chi == 2.0);
  CHECK(m.K == doctest::Approx(4.0 * std::numbers::e).epsilon(1e-14));
  for (double sigma : {0.01, 0.3, 1.0, 7.0}) {
    for (double alpha : {0.1, 1.0, 3.0}) {
      const DecayModel d = DecayModel::make(sigma, 0.2, alpha);
      CHECK(d.rho * d.chi == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(DecayModel::make(0.0, 0.0), InputError);
  CHECK_THROWS_AS(DecayModel::make(1.0, 0.0, -1.0), InputError);
}

TEST_CASE("chebyshev error bound") {
  const DecayModel m = DecayModel::make(1.0, 0.0, 1.0);
  CHECK(chebyshev_error_bound(m, 0) == doctest::Approx(2.0 * std::numbers::e).epsilon(1e-14));
  for (int k = 0; k < 20; ++k) {
    CHECK(chebyshev_error_bound(m, k) / chebyshev_error_bound(m, k + 1) == doctest::Approx(2.0).epsilon(1e-13));
  }
  const DecayModel h = DecayModel::make(2.0, 0.0, 0.5);
  // 2/(alpha sigma) e^{alpha^2} (1 + alpha sigma)^{-k} = 2 e^{0.25} / 1024
  CHECK(chebyshev_error_bound(h, 10) == doctest::Approx(0.002507862141968245).epsilon(1e-13));
  const DecayModel g = DecayModel::make(0.37, 0.0, 1.3);
  CHECK(chebyshev_error_bound(g, 7) / chebyshev_error_bound(g, 8) == doctest::Approx(g.chi).epsilon(1e-13));
  CHECK(std::exp(log_chebyshev_error_bound(g, 7)) == doctest::Approx(chebyshev_error_bound(g, 7)));
}

TEST_CASE("decay envelope") {
  const DecayModel m = DecayModel::make(1.0, 0.0, 1.0);
  CHECK(decay_envelope(m, 10) == doctest::Approx(4.0 * std::numbers::e / 1024.0).epsilon(1e-13));
  CHECK(decay_envelope(m, 10) == doctest::Approx(1.0618e-2).epsilon(1e-4));
  for (Index d = 1; d < 60; ++d) CHECK(decay_envelope(m, d + 1) < decay_envelope(m, d));
  CHECK_THROWS_AS(decay_envelope(m, 0), InputError);
  // large alpha stays finite in log space
  const DecayModel big = DecayModel::make(0.01, 0.0, 40.0);
  CHECK(std::isfinite(log_decay_envelope(big, 5)));
}

TEST_CASE("truncation and total bounds") {
  const DecayModel m = DecayModel::make(1.0, 0.0, 1.0);
  CHECK(truncation_bound(m, 10) == doctest::Approx(8.0 * std::numbers::e / 64.0).epsilon(1e-13));
  CHECK(truncation_bound(m, 10) == doctest::Approx(0.33979).epsilon(1e-4));
  CHECK(truncation_bound(m, 12) / truncation_bound(m, 10) == doctest::Approx(m.rho).epsilon(1e-13));
  CHECK_THROWS_AS(truncation_bound(m, 9), InputError);
  CHECK_THROWS_AS(truncation_bound(m, 0), InputError);
  CHECK(total_maxnorm_bound(m, 10, 0.0) == doctest::Approx(truncation_bound(m, 10)));
  CHECK(total_maxnorm_bound(m, 11, 0.0) == doctest::Approx(truncation_bound(m, 10)));
  CHECK(total_maxnorm_bound(m, 2000, 0.25) == doctest::Approx(0.25));
  CHECK(total_maxnorm_bound(m, std::nullopt, 0.125) == 0.125);
  CHECK_THROWS_AS(total_maxnorm_bound(m, 4, -1.0), InputError);
}

TEST_CASE("alpha optimisation") {
  const double sigma = 1.0;
  const auto opt = optimize_alpha(sigma, 20.0, BoundKind::envelope);
  auto logb = [&](double a) { return log_decay_envelope(DecayModel::make(sigma, 0.0, a), 20); };
  const double h = 1e-4 * opt.alpha;
  CHECK(std::abs((logb(opt.alpha + h) - logb(opt.alpha - h)) / (2 * h)) < 1e-5);
  CHECK(opt.log_bound == doctest::Approx(logb(opt.alpha)).epsilon(1e-12));
  // dense scan never beats the optimum
  for (double a = 0.01; a < 8.0; a += 0.01) CHECK(logb(a) >= opt.log_bound - 1e-12);

  double prev = 0;
  for (const double order : {5.0, 10.0, 20.0, 40.0}) {
    double d = order;
    for (BoundKind kind : {BoundKind::chebyshev, BoundKind::envelope, BoundKind::truncation}) {
      if (kind == BoundKind::truncation) d = 2 * std::ceil(d / 2);
      const auto o = optimize_alpha(0.3, d, kind);
      const double at_one =
          kind == BoundKind::chebyshev    ? log_chebyshev_error_bound(DecayModel::make(0.3, 0, 1.0), static_cast<int>(d))
          : kind == BoundKind::envelope   ? log_decay_envelope(DecayModel::make(0.3, 0, 1.0), static_cast<Index>(d))
                                          : std::log(truncation_bound(DecayModel::make(0.3, 0, 1.0), static_cast<Index>(d)));
      CHECK(o.log_bound <= at_one + 1e-12);
    }
    const double a = optimize_alpha(0.3, order, BoundKind::envelope).alpha;
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("spectrum scaling") {
  const auto s = SpectrumScaling::from_interval(-5.0, 195.0, 0.01);
  CHECK(s.center == 95.0);
  CHECK(s.radius == doctest::Approx(101.0));
  CHECK(s.unscale(s.scale(3.7)) == doctest::Approx(3.7));
  CHECK(std::abs(s.scale(-5.0)) < 1.0);
  CHECK(s.scaled_sigma(1.0) == doctest::Approx(1.0 / 101.0));
  const auto point = SpectrumScaling::from_interval(3.0, 3.0);
  CHECK(point.scale(3.0) == 0.0);
  CHECK(point.radius > 3.0);
  CHECK_THROWS_AS(SpectrumScaling::from_interval(2.0, 1.0), InputError);
}

TEST_CASE("envelope holds on a scaled laplacian") {
  const auto a = test::laplacian_1d(100, true);
  SpectrumScaling s;
  const Matrix sa = scaled(a, s);
  const double sigma = s.scaled_sigma(1.0);
  const double mu = s.scale(2.0);
  const Matrix f = oracle::exact_lss_operator(sa, mu, sigma);
  for (Index j = 0; j < 100; j += 33) {
    const auto dist = geodesic_distances(a, IndexSet({j}));
    for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
      const DecayModel m = DecayModel::make(sigma, mu, alpha);
      for (Index i = 0; i < 100; ++i) {
        if (dist[i] >= 1) CHECK(std::abs(f(i, j)) <= decay_envelope(m, dist[i]));
      }
    }
  }
}

TEST_CASE("truncation bound holds for a window submatrix") {
  const Index n = 61;
  const auto a = test::laplacian_1d(n, false);
  SpectrumScaling s;
  const Matrix sa = scaled(a, s);
  const Index j = 30;
  const auto dist = geodesic_distances(a, IndexSet({j}));
  for (Index m : {2, 6, 10, 14}) {
    Matrix sb = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index l = 0; l < n; ++l) {
        if (dist[i] <= m && dist[l] <= m) sb(i, l) = sa(i, l);
      }
    }
    for (double sigma : {0.3, 0.6}) {
      const Matrix fa = oracle::exact_lss_operator(sa, 0.1, sigma);
      const Matrix fb = oracle::exact_lss_operator(sb, 0.1, sigma);
      const double bound = truncation_bound(DecayModel::make(sigma, 0.1, optimize_alpha(sigma, m, BoundKind::truncation).alpha), m);
      for (Index i = 0; i < n; ++i) {
        if (dist[i] <= static_cast<std::uint32_t>(m / 2 + 1)) CHECK(std::abs(fa(i, j) - fb(i, j)) <= bound);
      }
    }
  }
}

TEST_CASE("agreement near j propagates to matrix powers") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = test::random_sparse(40, 0.08, 100 + seed);
    const Matrix da = a.to_dense();
    const Index j = static_cast<Index>(seed * 3 % 40);
    const auto dist = geodesic_distances(a, IndexSet({j}));
    for (int m : {2, 4, 6}) {
      Matrix db = da;
      for (Index i = 0; i < 40; ++i) {
        for (Index l = 0; l < 40; ++l) {
          if (!(dist[i] <= static_cast<std::uint32_t>(m) && dist[l] <= static_cast<std::uint32_t>(m)) && da(i, l) != 0) {
            db(i, l) = (i + l) % 3 == 0 ? 0.0 : 0.5 * da(i, l);
          }
        }
      }
      db = 0.5 * (db + db.transpose()).eval();
      Matrix pa = Matrix::Identity(40, 40), pb = pa;
      for (int k = 1; k <= m; ++k) {
        pa = pa * da;
        pb = pb * db;
        for (Index i = 0; i < 40; ++i) {
          for (Index l = 0; l < 40; ++l) {
            const auto r = static_cast<std::uint32_t>(m - k + 1);
            if (dist[i] <= r && dist[l] <= r) CHECK(std::abs(pa(i, l) - pb(i, l)) <= 1e-12);
          }
        }
      }
    }
  }
}
