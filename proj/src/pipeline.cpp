#include "lss/pipeline.hpp"

#include <chrono>

namespace lss {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<double> SliceResult::reported() const {
  std::vector<double> out;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (!spurious[j]) out.push_back(theta[j]);
  }
  return out;
}

Index SliceResult::spurious_count() const {
  Index c = 0;
  for (bool f : spurious) c += f;
  return c;
}

SliceRun run_slice(const SparseHermitian& a, const Partition& p, const SliceOptions& options) {
  options.params.validate();
  SliceRun run;
  auto& r = run.result;
  r.n = a.size();
  r.element_count = p.element_count();

  auto t0 = std::chrono::steady_clock::now();
  run.basis = build_lss_basis(a, p, options.params);
  r.times.basis = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  run.pencil = assemble_pencil(a, p, run.basis, options.assembly);
  r.times.assembly = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  run.solution = solve_pencil(run.pencil, options.pencil);
  r.times.solve = seconds_since(t0);

  const double mu = options.params.mu;
  const double w = options.half_width();
  r.window_lo = mu - w;
  r.window_hi = mu + w;
  const auto idx = select_window(run.solution.theta, r.window_lo, r.window_hi);
  Vector theta(static_cast<Index>(idx.size()));
  r.c.resize(run.basis.n_b, static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    theta(static_cast<Index>(j)) = run.solution.theta(idx[j]);
    r.c.col(static_cast<Index>(j)) = run.solution.c.col(idx[j]);
  }
  r.theta.assign(theta.data(), theta.data() + theta.size());

  t0 = std::chrono::steady_clock::now();
  r.residual_local = residual_norms_local(run.pencil, run.basis, p, r.c, theta);
  r.residual_global = residual_norms_global(a, run.basis, p, r.c, theta);
  r.times.residuals = seconds_since(t0);

  const auto& basis_res = options.filter_on == ResidualMode::global ? r.residual_global : r.residual_local;
  r.spurious_threshold = spurious_threshold(basis_res, options.eta_abs_value(), options.eta_rel);
  r.spurious = filter_spurious(basis_res, options.eta_abs_value(), options.eta_rel);

  r.n_b = run.basis.n_b;
  for (const auto& el : run.basis.elements) r.s_total += el.s;
  r.pencil_size = run.pencil.n_b;
  r.retained = run.solution.retained;
  r.dropped = run.solution.dropped;
  r.b_min = run.solution.b_min;
  r.b_max = run.solution.b_max;
  r.condition = run.solution.condition;
  r.ill_conditioned = !(r.condition <= options.ill_condition_threshold);
  r.fill_fraction = run.pencil.fill_fraction();
  r.max_tau_abs = run.basis.max_tau_abs;
  r.empty_elements = run.basis.empty_elements;
  return run;
}

}  // namespace lss
