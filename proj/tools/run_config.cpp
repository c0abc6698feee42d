#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lss/error.hpp"
#include "lss/matrix_market.hpp"

namespace lss::cli {

namespace {

using io::Json;

// Member reader that rejects unknown keys.
class Section {
 public:
  Section(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw InputError("config: '" + name_ + "' must be an object");
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const Json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const nlohmann::json::exception&) {
        throw InputError("config: '" + name_ + "." + key + "' has the wrong type");
      }
    }
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    T tmp{};
    if (find(key)) {
      get(key, tmp);
      out = tmp;
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw InputError("config: unknown key '" + name_ + "." + it.key() + "'");
    }
  }

 private:
  const Json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

double parse_c_window(const Json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw InputError("config: c_window must be a number or \"inf\"");
  }
  if (!v.is_number()) throw InputError("config: c_window must be a number or \"inf\"");
  return v.get<double>();
}

Json c_window_json(double c) { return std::isfinite(c) ? Json(c) : Json("inf"); }

template <class E>
E parse_enum(const std::string& key, const std::string& value,
             std::initializer_list<std::pair<const char*, E>> table) {
  for (const auto& [name, e] : table) {
    if (value == name) return e;
  }
  std::string names;
  for (const auto& [name, e] : table) names += std::string(names.empty() ? "" : ", ") + name;
  throw InputError("config: " + key + " must be one of " + names + " (got '" + value + "')");
}

const char* solver_name(LocalSolver s) {
  switch (s) {
    case LocalSolver::dense: return "dense";
    case LocalSolver::iterative: return "iterative";
    default: return "automatic";
  }
}

}  // namespace

LocalSolver parse_solver(const std::string& v) {
  return parse_enum<LocalSolver>("solver", v,
                                 {{"automatic", LocalSolver::automatic},
                                  {"dense", LocalSolver::dense},
                                  {"iterative", LocalSolver::iterative}});
}

Index RunConfig::element_count() const {
  if (partition.elements) return *partition.elements;
  return input.model == "2d" ? 16 : 8;
}

RunConfig config_from_json(const Json& root) {
  if (!root.is_object()) throw InputError("config: top level must be an object");
  if (root.contains("config") && root.contains("config_hash")) return config_from_json(root.at("config"));

  RunConfig c;
  Section top(root, "config");
  if (const Json* in = top.find("input")) {
    Section s(*in, "input");
    const bool has_model = in->contains("model") && !in->at("model").is_null();
    const bool has_matrix = in->contains("matrix") && !in->at("matrix").is_null();
    if (has_model && has_matrix) throw InputError("config: input needs exactly one of 'model' and 'matrix'");
    std::string matrix;
    s.get("model", c.input.model);
    s.get("matrix", matrix);
    if (has_matrix) {
      c.input.model = "matrix";
      c.input.matrix = matrix;
    }
    if (c.input.model != "1d" && c.input.model != "2d" && c.input.model != "laplacian" &&
        c.input.model != "matrix") {
      throw InputError("config: input.model must be 1d, 2d or laplacian");
    }
    s.get("n_wells", c.input.m1.n_wells);
    s.get("h", c.input.model == "2d" ? c.input.m2.h : c.input.m1.h);
    s.get("length_per_well", c.input.m1.length_per_well);
    s.get("nx", c.input.m2.nx);
    s.get("ny", c.input.m2.ny);
    s.get("wells_x", c.input.m2.wells_x);
    s.get("wells_y", c.input.m2.wells_y);
    double ks = 0.5;
    s.get("kinetic_scale", ks);
    c.input.m1.kinetic_scale = c.input.m2.kinetic_scale = ks;
    s.finish();
  }
  if (const Json* pj = top.find("partition")) {
    Section s(*pj, "partition");
    std::string map;
    s.get("kind", c.partition.kind);
    s.get("elements", c.partition.elements);
    s.get("map", map);
    s.get("hops", c.partition.hops);
    s.get("seed", c.partition.seed);
    c.partition.map = map;
    if (!map.empty() && !pj->contains("kind")) c.partition.kind = "map";
    s.finish();
  }
  if (const Json* sj = top.find("slice")) {
    Section s(*sj, "slice");
    SliceParams& p = c.slice.params;
    s.get("mu", p.mu);
    s.get("sigma", p.sigma);
    s.get("tau", p.tau);
    if (const Json* cw = s.find("c_window")) p.c_window = parse_c_window(*cw);
    s.get("window", c.slice.window_half_width);
    std::string str;
    if (s.find("solver")) {
      s.get("solver", str);
      p.solver = parse_solver(str);
    }
    s.get("dense_limit", p.dense_limit);
    if (s.find("svd_operand")) {
      s.get("svd_operand", str);
      p.svd_operand = parse_enum<SvdOperand>("svd_operand", str,
                                             {{"element", SvdOperand::element}, {"extended", SvdOperand::extended}});
    }
    if (s.find("assembly")) {
      s.get("assembly", str);
      c.slice.assembly = parse_assembly(str);
    }
    s.get("eps_b", c.slice.pencil.eps_b);
    s.get("eta_abs", c.slice.eta_abs);
    s.get("eta_rel", c.slice.eta_rel);
    if (s.find("filter_residual")) {
      s.get("filter_residual", str);
      c.slice.filter_on =
          parse_enum<ResidualMode>("filter_residual", str, {{"global", ResidualMode::global}, {"local", ResidualMode::local}});
    }
    s.get("ill_condition_threshold", c.slice.ill_condition_threshold);
    s.finish();
  }
  std::string out;
  top.get("output", out);
  if (!out.empty()) c.output = out;
  top.get("seed", c.seed);
  top.get("oracle", c.oracle);
  top.get("oracle_cap", c.oracle_cap);
  top.get("threads", c.threads);
  top.finish();
  validate_config(c);
  return c;
}

AssemblyMode parse_assembly(const std::string& v) {
  return parse_enum<AssemblyMode>("assembly", v, {{"local", AssemblyMode::local}, {"halo", AssemblyMode::halo}});
}

void validate_config(const RunConfig& c) {
  c.slice.params.validate();
  if (c.slice.window_half_width && !(*c.slice.window_half_width > 0)) {
    throw InputError("config: window half-width must be positive");
  }
  if (c.input.model == "matrix" && c.input.matrix.empty()) throw InputError("config: matrix input needs a path");
  if (c.partition.kind != "structured" && c.partition.kind != "general" && c.partition.kind != "map") {
    throw InputError("config: partition.kind must be structured, general or map");
  }
  if (c.partition.kind == "map" && c.partition.map.empty()) throw InputError("config: partition map path missing");
  if (c.element_count() < 1) throw InputError("config: elements must be >= 1");
  if (c.partition.hops && *c.partition.hops < 0) throw InputError("config: hops must be >= 0");
  if (c.oracle_cap < 1) throw InputError("config: oracle_cap must be >= 1");
  if (c.threads < 0) throw InputError("config: threads must be >= 0");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

Json config_to_json(const RunConfig& c) {
  Json j;
  Json in;
  if (c.input.model == "matrix") {
    in["matrix"] = c.input.matrix.string();
  } else {
    in["model"] = c.input.model;
    if (c.input.model == "2d") {
      in["nx"] = c.input.m2.nx;
      in["ny"] = c.input.m2.ny;
      in["h"] = c.input.m2.h;
      in["wells_x"] = c.input.m2.wells_x;
      in["wells_y"] = c.input.m2.wells_y;
      in["kinetic_scale"] = c.input.m2.kinetic_scale;
    } else {
      in["n_wells"] = c.input.m1.n_wells;
      in["h"] = c.input.m1.h;
      in["length_per_well"] = c.input.m1.length_per_well;
      in["kinetic_scale"] = c.input.m1.kinetic_scale;
    }
  }
  j["input"] = std::move(in);

  Json pj;
  pj["kind"] = c.partition.kind;
  pj["elements"] = c.element_count();
  pj["map"] = c.partition.map.empty() ? Json(nullptr) : Json(c.partition.map.string());
  pj["hops"] = c.partition.hops ? Json(*c.partition.hops) : Json(nullptr);
  pj["seed"] = c.partition.seed;
  j["partition"] = std::move(pj);

  const SliceParams& p = c.slice.params;
  Json sj;
  sj["mu"] = p.mu;
  sj["sigma"] = p.sigma;
  sj["tau"] = p.tau;
  sj["c_window"] = c_window_json(p.c_window);
  sj["window"] = c.slice.half_width();
  sj["solver"] = solver_name(p.solver);
  sj["dense_limit"] = p.dense_limit;
  sj["svd_operand"] = p.svd_operand == SvdOperand::element ? "element" : "extended";
  sj["assembly"] = c.slice.assembly == AssemblyMode::local ? "local" : "halo";
  sj["eps_b"] = c.slice.pencil.eps_b;
  sj["eta_abs"] = c.slice.eta_abs_value();
  sj["eta_rel"] = c.slice.eta_rel;
  sj["filter_residual"] = c.slice.filter_on == ResidualMode::global ? "global" : "local";
  sj["ill_condition_threshold"] = c.slice.ill_condition_threshold;
  j["slice"] = std::move(sj);

  j["output"] = c.output ? Json(c.output->string()) : Json(nullptr);
  j["seed"] = c.seed;
  j["oracle"] = c.oracle;
  j["oracle_cap"] = c.oracle_cap;
  j["threads"] = c.threads;
  return j;
}

SparseHermitian build_matrix(const RunConfig& c) {
  if (c.input.model == "matrix") return read_matrix_market(c.input.matrix);
  if (c.input.model == "2d") {
    ModelSpec2D spec = c.input.m2;
    spec.seed = c.seed;
    return generate_2d(spec);
  }
  ModelSpec1D spec = c.input.m1;
  spec.seed = c.seed;
  if (c.input.model == "laplacian") {
    spec.height_mean = 0;
    spec.height_std = 0;
  }
  return generate_1d(spec);
}

Partition build_partition(const SparseHermitian& a, const RunConfig& c) {
  const Index m = c.element_count();
  Partition p;
  if (c.partition.kind == "map") {
    const auto xi = io::read_partition_map(c.partition.map);
    if (static_cast<Index>(xi.size()) != a.size()) {
      throw InputError("partition map has " + std::to_string(xi.size()) + " entries, matrix has " +
                       std::to_string(a.size()) + " rows");
    }
    p = partition_from_map(a, xi);
  } else if (c.partition.kind == "general") {
    GraphPartitionOptions opt;
    opt.seed = c.partition.seed;
    p = partition_general(a, m, opt);
  } else if (c.input.model == "2d") {
    p = partition_structured_2d(c.input.m2.nx, c.input.m2.ny, m);
  } else if (c.input.model == "matrix") {
    // contiguous index blocks, neighbours from the sparsity pattern
    if (m > a.size()) throw InputError("more elements than vertices");
    std::vector<Index> xi(static_cast<std::size_t>(a.size()));
    for (Index i = 0; i < a.size(); ++i) xi[static_cast<std::size_t>(i)] = i * m / a.size();
    p = partition_from_map(a, xi);
  } else {
    p = partition_structured_1d(a.size(), m);
  }
  if (c.partition.hops) p = with_mhop_extension(a, p, static_cast<std::uint32_t>(*c.partition.hops));
  return p;
}

Json run_provenance(const RunConfig& c) {
  const Json cfg = config_to_json(c);
  Json j = io::provenance(cfg.dump(), c.seed);
  j["config"] = cfg;
  return j;
}

}  // namespace lss::cli
