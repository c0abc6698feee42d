#pragma once

#include <optional>

#include "lss/sparse.hpp"

namespace lss {

// Constants of the exponential decay estimate for the Gaussian filter on a
// spectrum inside (-1,1). Built from (sigma, alpha); rho * chi == 1.
struct DecayModel {
  double sigma = 0;
  double mu = 0;
  double alpha = 1.0;
  double rho = 0;
  double chi = 0;
  double K = 0;
  double log_K = 0;

  static DecayModel make(double sigma, double mu, double alpha = 1.0);
};

// z -> (z - c) / r with c the interval midpoint and r its half width times
// (1 + inflate).
struct SpectrumScaling {
  double center = 0;
  double radius = 1;

  static SpectrumScaling from_interval(double lo, double hi, double inflate = 0.01);
  static SpectrumScaling from_interval(const SpectralInterval& s, double inflate = 0.01);

  double scale(double z) const noexcept { return (z - center) / radius; }
  double unscale(double z) const noexcept { return z * radius + center; }
  double scaled_sigma(double sigma) const noexcept { return sigma / radius; }
};

// (2/(alpha sigma)) e^{alpha^2} (1+alpha sigma)^{-k}.
double chebyshev_error_bound(const DecayModel& model, int k);
double log_chebyshev_error_bound(const DecayModel& model, int k);

// K rho^d; d >= 1.
double decay_envelope(const DecayModel& model, Index d);
double log_decay_envelope(const DecayModel& model, Index d);

// 2 K rho^{m/2+1}; m even and >= 2.
double truncation_bound(const DecayModel& model, Index m);

// 2 K rho^{m/2+1} + tau_abs. An empty m means Q_k = whole graph, so only the
// truncation term tau_abs remains. Odd m is rounded down to even; m < 2
// leaves the distance term at its m = 0 value 2 K rho.
double total_maxnorm_bound(const DecayModel& model, std::optional<Index> m, double tau_abs);

enum class BoundKind { chebyshev, envelope, truncation };

struct AlphaOptimum {
  double alpha = 1.0;
  double log_bound = 0;
  double bound = 0;
};

// Golden-section search on ln(alpha) over [1e-4, 1e2] of the log of the
// selected bound. `order` is k, d or m respectively. The log-bound is convex
// in alpha so the minimiser is unique.
AlphaOptimum optimize_alpha(double sigma, double order, BoundKind kind = BoundKind::envelope);

}  // namespace lss
