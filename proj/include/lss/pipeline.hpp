#pragma once

#include <optional>
#include <vector>

#include "lss/lss_basis.hpp"
#include "lss/partition.hpp"
#include "lss/projection.hpp"

namespace lss {

enum class ResidualMode { global, local };

struct SliceOptions {
  SliceParams params;
  // Reporting window (mu - w, mu + w); default w = sigma / 2.
  std::optional<double> window_half_width;
  PencilOptions pencil;
  AssemblyMode assembly = AssemblyMode::local;
  std::optional<double> eta_abs;  // default 0.1 * sigma
  double eta_rel = 20.0;
  ResidualMode filter_on = ResidualMode::global;
  // B_U condition above which the run is reported as ill-conditioned.
  double ill_condition_threshold = 1e10;

  double half_width() const noexcept { return window_half_width ? *window_half_width : 0.5 * params.sigma; }
  double eta_abs_value() const noexcept { return eta_abs ? *eta_abs : 0.1 * params.sigma; }
};

struct StageTimes {
  double basis = 0;
  double assembly = 0;
  double solve = 0;
  double residuals = 0;
};

struct SliceResult {
  double window_lo = 0;
  double window_hi = 0;
  // Candidates: every pencil eigenvalue inside the window, ascending.
  std::vector<double> theta;
  std::vector<double> residual_local;
  std::vector<double> residual_global;
  std::vector<bool> spurious;
  double spurious_threshold = 0;
  Matrix c;  // n_b x candidates

  Index n = 0;
  Index element_count = 0;
  Index n_b = 0;
  Index s_total = 0;
  Index pencil_size = 0;
  Index retained = 0;
  Index dropped = 0;
  double b_min = 0;
  double b_max = 0;
  double condition = 0;
  bool ill_conditioned = false;
  double fill_fraction = 0;
  double max_tau_abs = 0;
  std::vector<Index> empty_elements;
  StageTimes times;

  std::vector<double> reported() const;
  Index spurious_count() const;
};

struct SliceRun {
  LssBasis basis;
  ProjectedPencil pencil;
  PencilSolution solution;
  SliceResult result;
};

// Basis, assembly, pencil solve, window selection, residuals and filtering.
SliceRun run_slice(const SparseHermitian& a, const Partition& p, const SliceOptions& options);

}  // namespace lss
