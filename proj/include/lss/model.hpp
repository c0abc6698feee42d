#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "lss/sparse.hpp"

namespace lss {

// Seeded stream for model potentials. mt19937_64 output is fixed by the C++
// standard; uniforms take the top 53 bits and normals use the cosine branch
// of Box-Muller (two uniforms per normal), so fixtures reproduce across
// platforms and languages.
class ModelRng {
 public:
  static constexpr std::string_view kName = "mt19937_64/box-muller-cos/v1";

  explicit ModelRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in (0, 1].
  double uniform();
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

double periodic_distance(double x, double x_prime, double length);

// -k*Laplacian + V on a periodic 1D grid, V(x) = -sum_i a_i exp(-dist(x,R_i)/delta_i).
//
// Wells sit at R_i = (i + 1/2) * length_per_well. Draw order: all heights,
// then all widths.
struct ModelSpec1D {
  int n_wells = 8;
  double h = 0.1;
  double length_per_well = 20.0;
  double height_mean = 5.0;
  double height_std = 1.0;
  double width_mean = 2.0;
  double width_std = 0.2;
  // Prefactor k of the Laplacian; 0.5 gives the Schroedinger form -1/2 Laplacian.
  double kinetic_scale = 0.5;
  std::uint64_t seed = 0;

  double length() const noexcept { return length_per_well * n_wells; }
  Index grid_size() const;  // throws InputError if length/h is not an integer
};

// 2D analogue on an nx-by-ny torus with a wells_x-by-wells_y lattice of wells
// whose heights, widths and positions are perturbed. Vertex (ix, iy) is
// numbered iy*nx + ix. Draw order: heights, widths, then (dx, dy) per well.
struct ModelSpec2D {
  Index nx = 40;
  Index ny = 40;
  double h = 1.0;
  int wells_x = 0;  // 0 selects max(1, nx/10)
  int wells_y = 0;  // 0 selects max(1, ny/10)
  double height_mean = 5.0;
  double height_std = 1.0;
  double width_mean = 2.0;
  double width_std = 0.2;
  double position_std = 0.5;
  double kinetic_scale = 0.5;
  std::uint64_t seed = 0;

  int resolved_wells_x() const noexcept;
  int resolved_wells_y() const noexcept;
};

struct Well {
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;
  double width = 1.0;
};

std::vector<Well> draw_wells_1d(const ModelSpec1D& spec);
std::vector<Well> draw_wells_2d(const ModelSpec2D& spec);

// Potential sampled at the grid points.
std::vector<double> potential_1d(const ModelSpec1D& spec);
std::vector<double> potential_2d(const ModelSpec2D& spec);

SparseHermitian generate_1d(const ModelSpec1D& spec);
SparseHermitian generate_2d(const ModelSpec2D& spec);

}  // namespace lss
