#include "lss/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "lss/error.hpp"

namespace lss {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }

  // Next line that is neither a comment nor blank.
  bool next_data(std::string& line) {
    while (next(line)) {
      if (line.empty() || line[0] == '%' || blank(line)) continue;
      return true;
    }
    return false;
  }
};

MatrixMarketHeader parse_header(LineReader& reader) {
  std::string line;
  if (!reader.next(line)) throw ParseError(reader.line_no + 1, "empty file");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError(reader.line_no, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError(reader.line_no, "object '" + object + "' is not 'matrix'");
  if (format != "coordinate") {
    throw ParseError(reader.line_no, "format '" + format + "' unsupported; coordinate required");
  }
  if (field == "pattern") throw ParseError(reader.line_no, "pattern matrices rejected: values required");
  if (field != "real" && field != "integer" && field != "complex" && field != "double") {
    throw ParseError(reader.line_no, "unknown field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian") {
    throw ParseError(reader.line_no, "symmetry '" + symmetry + "' unsupported");
  }
  MatrixMarketHeader h;
  h.field = field == "double" ? "real" : field;
  h.symmetry = symmetry;
  if (!reader.next_data(line)) throw ParseError(reader.line_no + 1, "missing size line");
  std::istringstream size_line(line);
  long long r = -1, c = -1, nz = -1;
  if (!(size_line >> r >> c >> nz) || r < 0 || c < 0 || nz < 0) {
    throw ParseError(reader.line_no, "malformed size line '" + line + "'");
  }
  if (r != c) throw ParseError(reader.line_no, "matrix is not square");
  h.rows = r;
  h.cols = c;
  h.stored_entries = nz;
  return h;
}

// strtod-style parse of the next token; returns false on failure.
bool read_token(const char*& p, const char* end, double& out) {
  while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (p >= end) return false;
  auto res = std::from_chars(p, end, out);
  if (res.ec != std::errc()) return false;
  p = res.ptr;
  return true;
}

bool read_index(const char*& p, const char* end, long long& out) {
  while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (p >= end) return false;
  auto res = std::from_chars(p, end, out);
  if (res.ec != std::errc()) return false;
  p = res.ptr;
  return true;
}

}  // namespace

MatrixMarketHeader read_matrix_market_header(std::istream& in) {
  LineReader reader{in};
  return parse_header(reader);
}

SparseHermitian read_matrix_market(std::istream& in, const MatrixMarketOptions& options) {
  LineReader reader{in};
  const MatrixMarketHeader h = parse_header(reader);
  const bool complex_field = h.field == "complex";
  const bool triangle = h.symmetry != "general";

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(h.stored_entries));
  std::string line;
  for (Index k = 0; k < h.stored_entries; ++k) {
    if (!reader.next_data(line)) {
      throw ParseError(reader.line_no + 1, "expected " + std::to_string(h.stored_entries) +
                                               " entries, found " + std::to_string(k));
    }
    const char* p = line.data();
    const char* end = p + line.size();
    long long i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!read_index(p, end, i) || !read_index(p, end, j) || !read_token(p, end, re) ||
        (complex_field && !read_token(p, end, im))) {
      throw ParseError(reader.line_no, "malformed entry '" + line + "'");
    }
    if (i < 1 || i > h.rows || j < 1 || j > h.cols) {
      throw ParseError(reader.line_no, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                           ") out of range");
    }
    if (std::abs(im) > options.imag_tol) {
      throw ParseError(reader.line_no, "nonzero imaginary part: only real-valued Hermitian matrices are supported");
    }
    if (triangle && h.symmetry == "hermitian" && i == j && im != 0.0) {
      throw ParseError(reader.line_no, "Hermitian diagonal must be real");
    }
    entries.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), re});
  }

  if (!triangle) {
    // Worst offender among stored pairs, after summing duplicates.
    std::map<std::pair<Index, Index>, double> vals;
    for (const auto& e : entries) vals[{e.row, e.col}] += e.value;
    double worst = 0.0;
    std::pair<Index, Index> where{0, 0};
    double a_ij = 0.0, a_ji = 0.0;
    for (const auto& [key, v] : vals) {
      if (key.first == key.second) continue;
      auto it = vals.find({key.second, key.first});
      const double mirror = it == vals.end() ? 0.0 : it->second;
      const double scale = std::max(std::abs(v), std::abs(mirror));
      if (scale == 0.0) continue;
      const double rel = std::abs(v - mirror) / scale;
      if (rel > worst) {
        worst = rel;
        where = key;
        a_ij = v;
        a_ji = mirror;
      }
    }
    if (worst > options.hermitian_tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "matrix is not Hermitian: worst offender A(" << where.first + 1 << "," << where.second + 1
          << ")=" << a_ij << " vs A(" << where.second + 1 << "," << where.first + 1 << ")=" << a_ji
          << " (relative asymmetry " << worst << ")";
      throw InputError(msg.str());
    }
  }
  return SparseHermitian::from_triplets(h.rows, entries, triangle);
}

SparseHermitian read_matrix_market(const std::filesystem::path& path, const MatrixMarketOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path.string() + "'");
  return read_matrix_market(in, options);
}

void write_matrix_market(std::ostream& out, const SparseHermitian& a, const std::string& comment) {
  Index lower = 0;
  for (Index i = 0; i < a.size(); ++i) {
    for (Index j : a.row_cols(i)) lower += (j <= i);
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "% " << l << "\n";
  }
  out << a.size() << " " << a.size() << " " << lower << "\n";
  char buf[64];
  // Column-major lower triangle, i >= j.
  std::vector<std::vector<std::pair<Index, double>>> by_col(static_cast<std::size_t>(a.size()));
  for (Index i = 0; i < a.size(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] <= i) by_col[static_cast<std::size_t>(cols[k])].push_back({i, vals[k]});
    }
  }
  for (Index j = 0; j < a.size(); ++j) {
    for (const auto& [i, v] : by_col[static_cast<std::size_t>(j)]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << i + 1 << " " << j + 1 << " " << buf << "\n";
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseHermitian& a,
                         const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write matrix file '" + path.string() + "'");
  write_matrix_market(out, a, comment);
}

}  // namespace lss
