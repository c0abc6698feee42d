#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lss/sparse.hpp"

namespace lss {

struct MatrixMarketHeader {
  std::string field;     // real | integer | complex
  std::string symmetry;  // general | symmetric | hermitian
  Index rows = 0;
  Index cols = 0;
  Index stored_entries = 0;
};

struct MatrixMarketOptions {
  // Relative tolerance for |a_ij - a_ji| on general-storage files.
  double hermitian_tol = 1e-12;
  // Largest |imag| accepted on complex files (imaginary parts are dropped).
  double imag_tol = 0.0;
};

// Reads banner and size line only.
MatrixMarketHeader read_matrix_market_header(std::istream& in);

// Coordinate format, 1-based indices. Symmetric/Hermitian storage is expanded
// to both triangles; general storage must be symmetric within hermitian_tol
// (the worst offending pair is reported otherwise) and is then averaged.
// Pattern files are rejected. ParseError carries the offending line.
SparseHermitian read_matrix_market(std::istream& in, const MatrixMarketOptions& options = {});
SparseHermitian read_matrix_market(const std::filesystem::path& path,
                                   const MatrixMarketOptions& options = {});

// Writes the lower triangle as `real symmetric` with 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseHermitian& a, const std::string& comment = {});
void write_matrix_market(const std::filesystem::path& path, const SparseHermitian& a,
                         const std::string& comment = {});

}  // namespace lss
