#include "lss/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <Eigen/Core>

#include "lss/error.hpp"
#include "lss/model.hpp"

static_assert(std::endian::native == std::endian::little, "basis container assumes a little-endian host");

namespace lss::io {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_f64(std::ostream& out, const double* p, std::size_t count) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InputError("basis container truncated");
  return v;
}
std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InputError("basis container truncated");
  return v;
}
void get_f64(std::istream& in, double* p, std::size_t count) {
  if (!in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * sizeof(double)))) {
    throw InputError("basis container truncated");
  }
}

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
  return a;
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_basis(std::ostream& out, const LssBasis& basis, const Partition& p, bool with_v) {
  if (static_cast<Index>(basis.elements.size()) != p.element_count()) {
    throw DimensionError("write_basis: basis and partition disagree on M");
  }
  out.write(kBasisMagic, sizeof kBasisMagic);
  put_u32(out, kBasisVersion);
  put_u32(out, with_v ? 1u : 0u);
  put_u64(out, static_cast<std::uint64_t>(p.n));
  put_u64(out, static_cast<std::uint64_t>(p.element_count()));
  for (Index o : basis.offsets) put_u64(out, static_cast<std::uint64_t>(o));
  for (std::size_t k = 0; k < basis.elements.size(); ++k) {
    const auto& el = basis.elements[k];
    const auto& q = p.extended[k];
    put_u64(out, static_cast<std::uint64_t>(el.t));
    put_u64(out, static_cast<std::uint64_t>(q.size()));
    put_u64(out, static_cast<std::uint64_t>(p.elements[k].size()));
    for (Index v : q) put_u64(out, static_cast<std::uint64_t>(v));
    put_f64(out, el.u.data(), static_cast<std::size_t>(el.u.size()));
    if (with_v) put_f64(out, el.v.data(), static_cast<std::size_t>(el.v.size()));
  }
  if (!out) throw InputError("write_basis: stream error");
}

void write_basis(const std::filesystem::path& path, const LssBasis& basis, const Partition& p, bool with_v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write basis file '" + path.string() + "'");
  write_basis(out, basis, p, with_v);
}

StoredBasis read_basis(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kBasisMagic, sizeof magic) != 0) {
    throw InputError("not a basis container (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kBasisVersion) throw InputError("unsupported basis container version " + std::to_string(version));
  const bool with_v = (get_u32(in) & 1u) != 0;
  StoredBasis s;
  s.n = static_cast<Index>(get_u64(in));
  const auto m = static_cast<Index>(get_u64(in));
  if (m < 0 || m > s.n + 1) throw InputError("basis container: implausible element count");
  for (Index k = 0; k <= m; ++k) s.offsets.push_back(static_cast<Index>(get_u64(in)));
  for (Index k = 0; k < m; ++k) {
    const auto t = static_cast<Index>(get_u64(in));
    const auto nq = static_cast<Index>(get_u64(in));
    const auto ne = static_cast<Index>(get_u64(in));
    if (nq > s.n || ne > nq || t > nq) throw InputError("basis container: inconsistent block sizes");
    std::vector<Index> q(static_cast<std::size_t>(nq));
    for (auto& v : q) v = static_cast<Index>(get_u64(in));
    s.extended.emplace_back(std::move(q));
    Matrix u(nq, t);
    get_f64(in, u.data(), static_cast<std::size_t>(u.size()));
    s.u.push_back(std::move(u));
    Matrix v;
    if (with_v) {
      v.resize(t, ne);
      get_f64(in, v.data(), static_cast<std::size_t>(v.size()));
    }
    s.v.push_back(std::move(v));
    s.element_sizes.push_back(ne);
  }
  return s;
}

StoredBasis read_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open basis file '" + path.string() + "'");
  return read_basis(in);
}

void write_vectors(const std::filesystem::path& path, const Matrix& x) {
  LssBasis b;
  ElementBasis el;
  el.u = x;
  el.t = x.cols();
  el.v.resize(0, 0);
  b.elements.push_back(std::move(el));
  finalize_offsets(b);
  Partition p;
  p.n = x.rows();
  p.elements.push_back(IndexSet::range(0, x.rows()));
  p.extended.push_back(IndexSet::range(0, x.rows()));
  p.neighbors.push_back(IndexSet::range(0, 1));
  p.xi.assign(static_cast<std::size_t>(x.rows()), 0);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write vector file '" + path.string() + "'");
  write_basis(out, b, p, false);
}

Json basis_metadata(const LssBasis& basis, const Partition& p) {
  Json j;
  j["n"] = p.n;
  j["M"] = p.element_count();
  j["n_b"] = basis.n_b;
  j["offsets"] = basis.offsets;
  j["empty_elements"] = basis.empty_elements;
  j["max_tau_abs"] = basis.max_tau_abs;
  Json els = Json::array();
  for (std::size_t k = 0; k < basis.elements.size(); ++k) {
    const auto& el = basis.elements[k];
    Json e;
    e["kappa"] = el.kappa;
    e["E_size"] = p.elements[k].size();
    e["Q_size"] = p.extended[k].size();
    e["s"] = el.s;
    e["t"] = el.t;
    e["singular_max"] = el.singular_values.size() ? Json(el.singular_values(0)) : Json(nullptr);
    e["singular_min_kept"] = el.t ? Json(el.singular_values(el.t - 1)) : Json(nullptr);
    e["tau_abs"] = el.tau_abs;
    e["local_solver"] = el.iterative ? "iterative" : "dense";
    e["eig_seconds"] = el.eig_seconds;
    e["svd_seconds"] = el.svd_seconds;
    els.push_back(std::move(e));
  }
  j["elements"] = std::move(els);
  return j;
}

Json slice_result_json(const SliceResult& r, const SliceOptions& options) {
  Json j;
  j["mu"] = options.params.mu;
  j["sigma"] = options.params.sigma;
  j["tau"] = options.params.tau;
  j["c_window"] = finite_or_null(options.params.c_window);
  j["window"] = {r.window_lo, r.window_hi};
  j["n"] = r.n;
  j["M"] = r.element_count;
  j["n_b"] = r.n_b;
  j["local_eigenpairs"] = r.s_total;
  Json cands = Json::array();
  for (std::size_t k = 0; k < r.theta.size(); ++k) {
    Json c;
    c["theta"] = r.theta[k];
    c["residual_global"] = r.residual_global[k];
    c["residual_local"] = r.residual_local[k];
    c["spurious"] = static_cast<bool>(r.spurious[k]);
    cands.push_back(std::move(c));
  }
  j["candidates"] = std::move(cands);
  j["ritz_values"] = doubles(r.reported());
  j["spurious_count"] = r.spurious_count();
  j["spurious_threshold"] = r.spurious_threshold;
  j["filter_residual"] = options.filter_on == ResidualMode::global ? "global" : "local";
  Json pc;
  pc["size"] = r.pencil_size;
  pc["retained"] = r.retained;
  pc["dropped"] = r.dropped;
  pc["b_min"] = r.b_min;
  pc["b_max"] = r.b_max;
  pc["condition"] = finite_or_null(r.condition);
  pc["ill_conditioned"] = r.ill_conditioned;
  pc["fill_fraction"] = r.fill_fraction;
  pc["eps_b"] = options.pencil.eps_b;
  j["pencil"] = std::move(pc);
  j["max_tau_abs"] = r.max_tau_abs;
  j["empty_elements"] = r.empty_elements;
  j["timings"] = {{"basis", r.times.basis},
                  {"assembly", r.times.assembly},
                  {"solve", r.times.solve},
                  {"residuals", r.times.residuals}};
  return j;
}

void write_slice_csv(std::ostream& out, const SliceResult& r) {
  out << "index,theta,residual_global,residual_local,spurious\n";
  for (std::size_t k = 0; k < r.theta.size(); ++k) {
    out << k << ',' << format_double(r.theta[k]) << ',' << format_double(r.residual_global[k]) << ','
        << format_double(r.residual_local[k]) << ',' << (r.spurious[k] ? 1 : 0) << '\n';
  }
}

void write_partition_map(std::ostream& out, std::span<const Index> xi) {
  for (Index v : xi) out << v << '\n';
}

void write_partition_map(const std::filesystem::path& path, std::span<const Index> xi) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write partition map '" + path.string() + "'");
  write_partition_map(out, xi);
}

std::vector<Index> read_partition_map(std::istream& in) {
  std::vector<Index> xi;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(line.substr(first), &used);
    } catch (const std::exception&) {
      throw ParseError(line_no, "expected an element id, got '" + line + "'");
    }
    if (line.find_first_not_of(" \t", first + used) != std::string::npos) {
      throw ParseError(line_no, "trailing characters after element id");
    }
    if (v < 0) throw ParseError(line_no, "negative element id");
    xi.push_back(static_cast<Index>(v));
  }
  return xi;
}

std::vector<Index> read_partition_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open partition map '" + path.string() + "'");
  return read_partition_map(in);
}

Json partition_summary(const Partition& p, const SparseHermitian* a) {
  Json j;
  j["n"] = p.n;
  j["M"] = p.element_count();
  j["hops"] = p.hops;
  j["c_Q"] = p.c_q();
  Index emin = p.n, emax = 0, qmin = p.n, qmax = 0;
  Json els = Json::array();
  for (Index k = 0; k < p.element_count(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const Index e = p.elements[ks].size();
    const Index q = p.extended[ks].size();
    emin = std::min(emin, e);
    emax = std::max(emax, e);
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
    els.push_back({{"kappa", k}, {"E_size", e}, {"Q_size", q}, {"neighbors", p.neighbors[ks].indices()}});
  }
  j["E_size"] = {{"min", emin}, {"max", emax}};
  j["Q_size"] = {{"min", qmin}, {"max", qmax}};
  if (a != nullptr) {
    j["edge_cut"] = edge_cut(*a, p.xi);
    const auto m = effective_hops(*a, p);
    j["effective_hops"] = m ? Json(*m) : Json(nullptr);
  }
  j["elements"] = std::move(els);
  return j;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json provenance(const std::string& config_text, std::uint64_t seed) {
  Json j;
  j["config_hash"] = "fnv1a64:" + fnv1a_hex(config_text);
  j["seed"] = seed;
  j["rng"] = std::string(ModelRng::kName);
  j["versions"] = {{"lss_slicing", "0.1.0"},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  return j;
}

}  // namespace lss::io
