#include "lss/decay.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lss/error.hpp"

namespace lss {

DecayModel DecayModel::make(double sigma, double mu, double alpha) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw InputError("DecayModel: sigma must be positive");
  if (!(alpha > 0) || !std::isfinite(alpha)) throw InputError("DecayModel: alpha must be positive");
  DecayModel m;
  m.sigma = sigma;
  m.mu = mu;
  m.alpha = alpha;
  const double as = alpha * sigma;
  m.chi = 1.0 + as;
  m.rho = 1.0 / m.chi;
  m.log_K = std::log(2.0) + alpha * alpha + std::log1p(as) - std::log(as);
  m.K = std::exp(m.log_K);
  return m;
}

SpectrumScaling SpectrumScaling::from_interval(double lo, double hi, double inflate) {
  if (!(hi >= lo)) throw InputError("SpectrumScaling: empty interval");
  if (!(inflate > 0)) throw InputError("SpectrumScaling: inflate must be positive");
  SpectrumScaling s;
  s.center = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  if (half == 0) half = std::max(1.0, std::abs(s.center));
  s.radius = half * (1.0 + inflate);
  return s;
}

SpectrumScaling SpectrumScaling::from_interval(const SpectralInterval& si, double inflate) {
  return from_interval(si.lo, si.hi, inflate);
}

double log_chebyshev_error_bound(const DecayModel& model, int k) {
  if (k < 0) throw InputError("chebyshev_error_bound: k must be >= 0");
  const double as = model.alpha * model.sigma;
  return std::log(2.0) - std::log(as) + model.alpha * model.alpha - static_cast<double>(k) * std::log1p(as);
}

double chebyshev_error_bound(const DecayModel& model, int k) {
  return std::exp(log_chebyshev_error_bound(model, k));
}

double log_decay_envelope(const DecayModel& model, Index d) {
  if (d < 1) throw InputError("decay_envelope: d must be >= 1 (the estimate excludes the diagonal)");
  return model.log_K + static_cast<double>(d) * std::log(model.rho);
}

double decay_envelope(const DecayModel& model, Index d) { return std::exp(log_decay_envelope(model, d)); }

double truncation_bound(const DecayModel& model, Index m) {
  if (m < 2 || m % 2 != 0) {
    throw InputError("truncation_bound: m must be even and >= 2, got " + std::to_string(m));
  }
  return std::exp(std::log(2.0) + model.log_K + static_cast<double>(m / 2 + 1) * std::log(model.rho));
}

double total_maxnorm_bound(const DecayModel& model, std::optional<Index> m, double tau_abs) {
  if (!(tau_abs >= 0)) throw InputError("total_maxnorm_bound: tau_abs must be >= 0");
  if (!m) return tau_abs;
  const Index even = *m < 0 ? 0 : (*m / 2) * 2;
  const double dist =
      std::exp(std::log(2.0) + model.log_K + static_cast<double>(even / 2 + 1) * std::log(model.rho));
  return dist + tau_abs;
}

namespace {

double log_bound(double sigma, double alpha, double order, BoundKind kind) {
  const double as = alpha * sigma;
  const double l1 = std::log1p(as);
  switch (kind) {
    case BoundKind::chebyshev:
      return std::log(2.0) - std::log(as) + alpha * alpha - order * l1;
    case BoundKind::envelope:
      return std::log(2.0) + alpha * alpha + l1 - std::log(as) - order * l1;
    case BoundKind::truncation: {
      const double e = std::floor(order / 2.0) + 1.0;
      return 2.0 * std::log(2.0) + alpha * alpha + l1 - std::log(as) - e * l1;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

AlphaOptimum optimize_alpha(double sigma, double order, BoundKind kind) {
  if (!(sigma > 0)) throw InputError("optimize_alpha: sigma must be positive");
  if (!(order >= 0)) throw InputError("optimize_alpha: order must be >= 0");
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(1e-4);
  double b = std::log(1e2);
  auto f = [&](double t) { return log_bound(sigma, std::exp(t), order, kind); };
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  AlphaOptimum out;
  out.alpha = std::exp(0.5 * (a + b));
  out.log_bound = log_bound(sigma, out.alpha, order, kind);
  out.bound = std::exp(out.log_bound);
  return out;
}

}  // namespace lss
