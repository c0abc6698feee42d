#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lss/error.hpp"
#include "lss/io.hpp"
#include "lss/matrix_market.hpp"
#include "lss/oracle.hpp"
#include "lss/validation.hpp"
#include "run_config.hpp"

namespace {

using namespace lss;
using io::Json;

// Exit 2.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::string model, matrix, partition_kind, partition_map, c_window, solver, assembly, format = "json", out;
  std::optional<int> nw, hops, threads;
  std::optional<Index> nx, ny, elements, oracle_cap;
  std::optional<double> h, length_per_well, kinetic_scale, mu, sigma, tau, window, eps_b;
  std::optional<std::uint64_t> seed;
  bool oracle = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->set_help_flag("--help", "print this help");
  app->add_option("--config", f.config, "JSON run config (or a provenance record)");
  app->add_option("--model", f.model, "1d | 2d | laplacian");
  app->add_option("--matrix", f.matrix, "Matrix Market input instead of a generated model");
  app->add_option("--nw", f.nw, "number of wells (1d)");
  app->add_option("--h", f.h, "grid spacing");
  app->add_option("--length-per-well", f.length_per_well, "1d cell length per well");
  app->add_option("--nx", f.nx, "2d grid width");
  app->add_option("--ny", f.ny, "2d grid height");
  app->add_option("--kinetic-scale", f.kinetic_scale, "Laplacian prefactor");
  app->add_option("--partition", f.partition_kind, "structured | general | map");
  app->add_option("--elements", f.elements, "number of elements M");
  app->add_option("--partition-map", f.partition_map, "vertex -> element map file");
  app->add_option("--hops", f.hops, "use m-hop extended sets");
  app->add_option("--mu", f.mu);
  app->add_option("--sigma", f.sigma);
  app->add_option("--tau", f.tau, "relative SVD truncation");
  app->add_option("--c-window", f.c_window, "local eigen-window in units of sigma, or inf");
  app->add_option("--window", f.window, "reporting half-width (default sigma/2)");
  app->add_option("--solver", f.solver, "automatic | dense | iterative");
  app->add_option("--assembly", f.assembly, "local | halo");
  app->add_option("--eps-b", f.eps_b, "B_U drop tolerance");
  app->add_option("--seed", f.seed);
  app->add_option("--threads", f.threads, "OpenMP threads (0: default)");
  app->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app->add_flag("--oracle", f.oracle, "compare against dense eigenvalues");
  app->add_option("--oracle-cap", f.oracle_cap, "largest n for dense reference computations");
  app->add_option("--out", f.out, "output file or directory");
}

cli::RunConfig resolve(const Flags& f) {
  cli::RunConfig c = f.config.empty() ? cli::RunConfig{} : cli::load_config(f.config);
  if (!f.model.empty() && !f.matrix.empty()) throw InputError("--model and --matrix are exclusive");
  if (!f.model.empty()) {
    if (f.model != "1d" && f.model != "2d" && f.model != "laplacian") {
      throw InputError("--model must be 1d, 2d or laplacian");
    }
    c.input.model = f.model;
  }
  if (!f.matrix.empty()) {
    c.input.model = "matrix";
    c.input.matrix = f.matrix;
  }
  if (f.nw) c.input.m1.n_wells = *f.nw;
  if (f.h) c.input.m1.h = c.input.m2.h = *f.h;
  if (f.length_per_well) c.input.m1.length_per_well = *f.length_per_well;
  if (f.nx) c.input.m2.nx = *f.nx;
  if (f.ny) c.input.m2.ny = *f.ny;
  if (f.kinetic_scale) c.input.m1.kinetic_scale = c.input.m2.kinetic_scale = *f.kinetic_scale;
  if (!f.partition_map.empty()) {
    c.partition.map = f.partition_map;
    c.partition.kind = "map";
  }
  if (!f.partition_kind.empty()) c.partition.kind = f.partition_kind;
  if (f.elements) c.partition.elements = *f.elements;
  if (f.hops) c.partition.hops = *f.hops;
  SliceParams& p = c.slice.params;
  if (f.mu) p.mu = *f.mu;
  if (f.sigma) {
    p.sigma = *f.sigma;
    // defaults tied to sigma follow it unless set explicitly
    if (f.config.empty()) {
      c.slice.window_half_width.reset();
      c.slice.eta_abs.reset();
    }
  }
  if (f.tau) p.tau = *f.tau;
  if (!f.c_window.empty()) {
    if (f.c_window == "inf") {
      p.c_window = std::numeric_limits<double>::infinity();
    } else {
      try {
        p.c_window = std::stod(f.c_window);
      } catch (const std::exception&) {
        throw InputError("--c-window must be a number or inf");
      }
    }
  }
  if (f.window) c.slice.window_half_width = *f.window;
  if (!f.solver.empty()) p.solver = cli::parse_solver(f.solver);
  if (!f.assembly.empty()) c.slice.assembly = cli::parse_assembly(f.assembly);
  if (f.eps_b) c.slice.pencil.eps_b = *f.eps_b;
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  if (f.oracle) c.oracle = true;
  if (f.oracle_cap) c.oracle_cap = *f.oracle_cap;
  if (!f.out.empty()) c.output = f.out;
  cli::validate_config(c);
  if (c.threads > 0) omp_set_num_threads(c.threads);
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

std::string csv_with_provenance(const Json& prov, const std::string& body) {
  return "# provenance " + prov.dump() + "\n" + body;
}

void require_oracle_size(const SparseHermitian& a, const cli::RunConfig& c) {
  if (a.size() > c.oracle_cap) {
    throw InputError("n=" + std::to_string(a.size()) + " exceeds the oracle cap " + std::to_string(c.oracle_cap));
  }
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Index>(i)] = v[i];
  return out;
}

Json ritz_json(const oracle::RitzComparison& cmp, const Vector& ref, const std::vector<double>& ritz) {
  Json j;
  j["reference_count"] = cmp.reference_count;
  j["ritz_count"] = cmp.ritz_count;
  j["count_match"] = cmp.count_match;
  j["max_pair_error"] = cmp.count_match ? Json(cmp.max_pair_error) : Json(nullptr);
  j["max_nearest_error"] = cmp.max_nearest_error;
  Json rows = Json::array();
  const std::size_t k = std::max(static_cast<std::size_t>(ref.size()), ritz.size());
  for (std::size_t i = 0; i < k; ++i) {
    Json r;
    r["reference"] = i < static_cast<std::size_t>(ref.size()) ? Json(ref[static_cast<Index>(i)]) : Json(nullptr);
    r["ritz"] = i < ritz.size() ? Json(ritz[i]) : Json(nullptr);
    if (cmp.count_match) r["error"] = std::abs(ref[static_cast<Index>(i)] - ritz[i]);
    rows.push_back(std::move(r));
  }
  j["table"] = std::move(rows);
  return j;
}

// generate ----------------------------------------------------------------

int cmd_generate(const Flags& f) {
  const cli::RunConfig c = resolve(f);
  if (c.input.model == "matrix") throw InputError("generate needs a model, not --matrix");
  const SparseHermitian a = cli::build_matrix(c);
  const Json prov = cli::run_provenance(c);

  Json meta;
  meta["n"] = a.size();
  meta["nnz"] = a.nnz();
  meta["model"] = c.input.model;
  Json wells = Json::array();
  if (c.input.model != "laplacian") {
    std::vector<Well> ws;
    if (c.input.model == "2d") {
      ModelSpec2D s = c.input.m2;
      s.seed = c.seed;
      ws = draw_wells_2d(s);
    } else {
      ModelSpec1D s = c.input.m1;
      s.seed = c.seed;
      ws = draw_wells_1d(s);
    }
    for (const Well& w : ws) wells.push_back({{"x", w.x}, {"y", w.y}, {"height", w.height}, {"width", w.width}});
  }
  meta["wells"] = std::move(wells);
  meta["provenance"] = prov;

  if (c.output) {
    write_matrix_market(*c.output, a, "lss generate model=" + c.input.model + " seed=" + std::to_string(c.seed));
    std::filesystem::path mp = *c.output;
    mp.replace_extension(".json");
    if (mp == *c.output) mp += ".json";
    write_text(mp, meta.dump(2) + "\n");
    meta["matrix_file"] = c.output->string();
    meta["metadata_file"] = mp.string();
    std::cout << meta.dump(2) << "\n";
  } else {
    std::ostringstream os;
    write_matrix_market(os, a, "lss generate model=" + c.input.model + " seed=" + std::to_string(c.seed));
    std::cout << os.str();
    std::cerr << prov.dump() << "\n";
  }
  return 0;
}

// partition ---------------------------------------------------------------

int cmd_partition(const Flags& f) {
  const cli::RunConfig c = resolve(f);
  const SparseHermitian a = cli::build_matrix(c);
  const Partition p = cli::build_partition(a, c);
  Json j = io::partition_summary(p, &a);
  j["provenance"] = cli::run_provenance(c);
  if (c.output) {
    io::write_partition_map(*c.output, p.xi);
    j["map_file"] = c.output->string();
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

// slice -------------------------------------------------------------------

struct OracleCheck {
  Vector reference;
  oracle::RitzComparison cmp;
  double seconds = 0;
};

OracleCheck oracle_check(const SparseHermitian& a, const SliceResult& r, const cli::RunConfig& c) {
  require_oracle_size(a, c);
  OracleCheck o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto eig = oracle::dense_eig(a.to_dense(), false, c.oracle_cap);
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.reference = oracle::eigs_in_window(eig, r.window_lo, r.window_hi);
  o.cmp = oracle::compare_ritz(o.reference, to_vector(r.reported()), eig.values);
  return o;
}

int cmd_slice(const Flags& f) {
  const cli::RunConfig c = resolve(f);
  const SparseHermitian a = cli::build_matrix(c);
  const Partition p = cli::build_partition(a, c);
  const SliceRun run = run_slice(a, p, c.slice);
  const SliceResult& r = run.result;
  const Json prov = cli::run_provenance(c);

  Json j = io::slice_result_json(r, c.slice);
  if (c.oracle) {
    const OracleCheck o = oracle_check(a, r, c);
    j["oracle"] = ritz_json(o.cmp, o.reference, r.reported());
    j["oracle"]["seconds"] = o.seconds;
  }
  std::ostringstream csv;
  io::write_slice_csv(csv, r);

  if (c.output) {
    std::filesystem::create_directories(*c.output);
    write_text(*c.output / "result.json", j.dump(2) + "\n");
    write_text(*c.output / "result.csv", csv.str());
    write_text(*c.output / "provenance.json", prov.dump(2) + "\n");
    io::write_basis(*c.output / "basis.bin", run.basis, p);
  }
  if (f.format == "csv") {
    std::cout << csv_with_provenance(prov, csv.str());
  } else {
    j["provenance"] = prov;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

// decay -------------------------------------------------------------------

int cmd_decay(const Flags& f, Index column, const std::vector<double>& alphas) {
  const cli::RunConfig c = resolve(f);
  const SparseHermitian a = cli::build_matrix(c);
  require_oracle_size(a, c);
  if (column < 0 || column >= a.size()) throw InputError("--column out of range");
  const SliceParams& sp = c.slice.params;
  const Matrix fa = oracle::exact_lss_operator(a.to_dense(), sp.mu, sp.sigma, c.oracle_cap);
  const DistanceMap dist = geodesic_distances(a, IndexSet({column}));
  std::map<Index, std::pair<double, Index>> by_d;  // d -> (max |f_ij|, count)
  for (Index i = 0; i < a.size(); ++i) {
    if (!dist.reachable(i)) continue;
    auto& slot = by_d[static_cast<Index>(dist[i])];
    slot.first = std::max(slot.first, std::abs(fa(i, column)));
    slot.second += 1;
  }
  const SpectrumScaling s = SpectrumScaling::from_interval(spectral_interval(a));
  const double sh = s.scaled_sigma(sp.sigma);
  const double mh = s.scale(sp.mu);

  std::ostringstream os;
  os << "d,count,max_abs";
  for (double al : alphas) os << ",envelope_alpha_" << io::format_double(al);
  os << ",envelope_best,alpha_best\n";
  for (const auto& [d, v] : by_d) {
    os << d << ',' << v.second << ',' << io::format_double(v.first);
    for (double al : alphas) {
      os << ',';
      if (d >= 1) os << io::format_double(decay_envelope(DecayModel::make(sh, mh, al), d));
    }
    os << ',';
    if (d >= 1) {
      const AlphaOptimum opt = optimize_alpha(sh, static_cast<double>(d), BoundKind::envelope);
      os << io::format_double(opt.bound) << ',' << io::format_double(opt.alpha);
    } else {
      os << ',';
    }
    os << '\n';
  }
  const Json prov = cli::run_provenance(c);
  if (c.output) {
    write_text(*c.output, os.str());
    std::filesystem::path pp = *c.output;
    pp += ".provenance.json";
    write_text(pp, prov.dump(2) + "\n");
  }
  std::cout << csv_with_provenance(prov, os.str());
  return 0;
}

// validate ----------------------------------------------------------------

int cmd_validate(const Flags& f, double ritz_tol) {
  cli::RunConfig c = resolve(f);
  const SparseHermitian a = cli::build_matrix(c);
  require_oracle_size(a, c);
  const Partition p = cli::build_partition(a, c);
  const SliceRun run = run_slice(a, p, c.slice);
  const SliceResult& r = run.result;

  const auto eig = oracle::dense_eig(a.to_dense(), true, c.oracle_cap);
  const Matrix fa = oracle::apply_function_gaussian(eig, c.slice.params.mu, c.slice.params.sigma);
  const OperatorValidation v = validate_operator(a, p, run.basis, c.slice.params, fa, spectral_interval(a));
  const Vector ref = oracle::eigs_in_window(eig, r.window_lo, r.window_hi);
  const auto ritz = r.reported();
  const auto cmp = oracle::compare_ritz(ref, to_vector(ritz), eig.values);

  Json j;
  Json op;
  op["measured"] = v.measured;
  op["f_max"] = v.f_max;
  op["relative"] = v.relative;
  op["hops"] = v.hops ? Json(*v.hops) : Json(nullptr);
  op["sigma_hat"] = v.sigma_hat;
  op["mu_hat"] = v.mu_hat;
  op["alpha"] = v.alpha;
  op["K"] = v.K;
  op["rho"] = v.rho;
  op["distance_term"] = v.distance_term;
  op["tau_term"] = v.tau_term;
  op["bound"] = v.bound;
  op["window_tail"] = v.window_tail;
  op["roundoff"] = v.roundoff;
  j["operator"] = std::move(op);
  j["ritz"] = ritz_json(cmp, ref, ritz);

  Json res = Json::array();
  double max_gap = 0;
  for (std::size_t k = 0; k < r.theta.size(); ++k) {
    res.push_back({{"theta", r.theta[k]},
                   {"local", r.residual_local[k]},
                   {"global", r.residual_global[k]},
                   {"spurious", static_cast<bool>(r.spurious[k])}});
    max_gap = std::max(max_gap, std::abs(r.residual_local[k] - r.residual_global[k]));
  }
  j["residuals"] = {{"candidates", std::move(res)}, {"max_local_global_gap", max_gap}};
  j["pencil"] = {{"condition", r.condition}, {"ill_conditioned", r.ill_conditioned}, {"n_b", r.n_b}};

  const bool ritz_ok = cmp.count_match && cmp.max_pair_error <= ritz_tol;
  Json checks = Json::array();
  checks.push_back({{"name", "operator_bound"}, {"pass", v.sound}});
  checks.push_back({{"name", "ritz_count"}, {"pass", cmp.count_match}});
  checks.push_back({{"name", "ritz_error"}, {"pass", ritz_ok}, {"tolerance", ritz_tol}});
  j["checks"] = checks;
  j["pass"] = v.sound && ritz_ok;
  const Json prov = cli::run_provenance(c);
  j["provenance"] = prov;
  if (c.output) {
    std::filesystem::create_directories(*c.output);
    write_text(*c.output / "validate.json", j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << "\n";
  if (!(v.sound && ritz_ok)) throw ValidationFailure("validation failed");
  return 0;
}

// bench -------------------------------------------------------------------

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int cmd_bench(const Flags& f, std::vector<Index> sizes, int repeats, bool assert_ratio, double max_ratio) {
  const cli::RunConfig base = resolve(f);
  if (base.input.model != "1d" && base.input.model != "laplacian") throw InputError("bench supports the 1d models");
  if (sizes.empty()) throw InputError("bench needs at least one size");
  if (repeats < 1) throw InputError("--repeats must be >= 1");
  std::sort(sizes.begin(), sizes.end());
  const Index n0 = sizes.front();

  struct Row {
    Index n, m, n_b;
    double basis, assembly, solve, residuals;
  };
  std::vector<Row> rows;
  for (Index n : sizes) {
    cli::RunConfig c = base;
    const double cells = static_cast<double>(n) * c.input.m1.h / c.input.m1.length_per_well;
    if (std::abs(cells - std::round(cells)) > 1e-9 || cells < 1) {
      throw InputError("size " + std::to_string(n) + " is not a whole number of wells");
    }
    c.input.m1.n_wells = static_cast<int>(std::llround(cells));
    const Index m = std::max<Index>(1, c.element_count() * n / n0);
    c.partition.elements = m;
    const SparseHermitian a = cli::build_matrix(c);
    const Partition p = cli::build_partition(a, c);
    std::vector<double> tb, ta, ts, tr;
    Index nb = 0;
    for (int rep = 0; rep < repeats; ++rep) {
      const SliceRun run = run_slice(a, p, c.slice);
      tb.push_back(run.result.times.basis);
      ta.push_back(run.result.times.assembly);
      ts.push_back(run.result.times.solve);
      tr.push_back(run.result.times.residuals);
      nb = run.result.n_b;
    }
    rows.push_back({a.size(), m, nb, median(tb), median(ta), median(ts), median(tr)});
  }

  std::ostringstream os;
  os << "n,elements,n_b,basis,assembly,solve,residuals,basis_assembly,ratio_per_doubling\n";
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const double ba = r.basis + r.assembly;
    os << r.n << ',' << r.m << ',' << r.n_b << ',' << io::format_double(r.basis) << ','
       << io::format_double(r.assembly) << ',' << io::format_double(r.solve) << ','
       << io::format_double(r.residuals) << ',' << io::format_double(ba) << ',';
    if (i > 0) {
      const Row& q = rows[i - 1];
      const double doublings = std::log2(static_cast<double>(r.n) / static_cast<double>(q.n));
      const double ratio = doublings > 0 ? std::pow(ba / (q.basis + q.assembly), 1.0 / doublings) : 1.0;
      os << io::format_double(ratio);
      if (ratio > max_ratio) ok = false;
    }
    os << '\n';
  }
  const Json prov = cli::run_provenance(base);
  if (base.output) write_text(*base.output, os.str());
  std::cout << csv_with_provenance(prov, os.str());
  if (assert_ratio && !ok) throw ValidationFailure("basis+assembly time grew faster than " +
                                                    io::format_double(max_ratio) + "x per doubling");
  return 0;
}

void print_error(const std::string& type, const std::string& message) {
  Json e;
  e["error"] = {{"type", type}, {"message", message}};
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized spectrum slicing for sparse Hermitian matrices"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);
  Flags flags;

  auto* gen = app.add_subcommand("generate", "write a model Hamiltonian as Matrix Market");
  add_common(gen, flags);
  auto* part = app.add_subcommand("partition", "partition the graph of the matrix");
  add_common(part, flags);
  auto* slice = app.add_subcommand("slice", "eigenvalues in (mu - w, mu + w)");
  add_common(slice, flags);

  auto* decay = app.add_subcommand("decay", "off-diagonal decay of f(A) against the envelope");
  add_common(decay, flags);
  Index column = 0;
  std::vector<double> alphas = {0.5, 1.0, 2.0};
  decay->add_option("--column", column, "column j of f(A)");
  decay->add_option("--alphas", alphas, "alpha grid for the envelope")->delimiter(',');

  auto* validate = app.add_subcommand("validate", "check a slice against dense references");
  add_common(validate, flags);
  double ritz_tol = 1e-4;
  validate->add_option("--ritz-tol", ritz_tol, "largest accepted |lambda - theta|");

  auto* bench = app.add_subcommand("bench", "stage timings over growing n");
  add_common(bench, flags);
  std::vector<Index> sizes = {1600, 3200, 6400};
  int repeats = 3;
  bool assert_ratio = false;
  double max_ratio = 2.6;
  bench->add_option("--sizes", sizes, "matrix sizes")->delimiter(',');
  bench->add_option("--repeats", repeats, "runs per size (median reported)");
  bench->add_flag("--assert", assert_ratio, "fail when basis+assembly grows too fast");
  bench->add_option("--max-ratio", max_ratio, "allowed time ratio per doubling of n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 3;
  }

  try {
    if (*gen) return cmd_generate(flags);
    if (*part) return cmd_partition(flags);
    if (*slice) return cmd_slice(flags);
    if (*decay) return cmd_decay(flags, column, alphas);
    if (*validate) return cmd_validate(flags, ritz_tol);
    if (*bench) return cmd_bench(flags, sizes, repeats, assert_ratio, max_ratio);
  } catch (const ValidationFailure& e) {
    print_error("validation", e.what());
    return 2;
  } catch (const InputError& e) {
    print_error("input", e.what());
    return 3;
  } catch (const DimensionError& e) {
    print_error("input", e.what());
    return 3;
  } catch (const ConvergenceError& e) {
    print_error("convergence", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
