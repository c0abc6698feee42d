#include "lss/validation.hpp"

#include <cmath>
#include <limits>

#include "lss/error.hpp"

namespace lss {

OperatorValidation validate_operator(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                     const SliceParams& params, const Matrix& f_exact,
                                     const SpectralInterval& interval) {
  if (f_exact.rows() != a.size() || f_exact.cols() != a.size()) {
    throw DimensionError("validate_operator: f(A) has the wrong shape");
  }
  OperatorValidation v;
  const Matrix approx = Matrix(assemble_approx_operator(basis, p));
  v.measured = (f_exact - approx).cwiseAbs().maxCoeff();
  v.f_max = f_exact.cwiseAbs().maxCoeff();
  v.relative = v.f_max > 0 ? v.measured / v.f_max : 0.0;

  const SpectrumScaling s = SpectrumScaling::from_interval(interval);
  v.sigma_hat = s.scaled_sigma(params.sigma);
  v.mu_hat = s.scale(params.mu);
  v.hops = effective_hops(a, p);
  v.tau_term = basis.max_tau_abs;
  if (v.hops) {
    v.hops_even = std::max<Index>(0, (*v.hops / 2) * 2);
    const AlphaOptimum opt = optimize_alpha(v.sigma_hat, static_cast<double>(v.hops_even), BoundKind::truncation);
    v.alpha = opt.alpha;
  }
  const DecayModel model = DecayModel::make(v.sigma_hat, v.mu_hat, v.alpha);
  v.K = model.K;
  v.rho = model.rho;
  v.bound = total_maxnorm_bound(model, v.hops ? std::optional<Index>(v.hops_even) : std::nullopt, v.tau_term);
  v.distance_term = v.bound - v.tau_term;
  v.window_tail = std::isfinite(params.c_window) ? std::exp(-params.c_window * params.c_window) : 0.0;
  v.roundoff = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, v.f_max);
  v.sound = v.measured <= v.bound + v.window_tail + v.roundoff;
  return v;
}

}  // namespace lss
