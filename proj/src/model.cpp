#include "lss/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lss/error.hpp"

namespace lss {

double ModelRng::uniform() {
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double ModelRng::normal(double mean, double stddev) {
  const double u1 = uniform();
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

double periodic_distance(double x, double x_prime, double length) {
  if (!(length > 0)) throw InputError("periodic_distance: length must be positive");
  double d = std::fmod(std::abs(x - x_prime), length);
  return std::min(d, length - d);
}

Index ModelSpec1D::grid_size() const {
  if (!(h > 0)) throw InputError("ModelSpec1D: h must be positive");
  if (n_wells < 1) throw InputError("ModelSpec1D: n_wells must be >= 1");
  const double ratio = length() / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded) || rounded < 1) {
    throw InputError("ModelSpec1D: length/h = " + std::to_string(ratio) + " is not an integer");
  }
  return static_cast<Index>(rounded);
}

int ModelSpec2D::resolved_wells_x() const noexcept {
  return wells_x > 0 ? wells_x : std::max(1, static_cast<int>(nx / 10));
}

int ModelSpec2D::resolved_wells_y() const noexcept {
  return wells_y > 0 ? wells_y : std::max(1, static_cast<int>(ny / 10));
}

std::vector<Well> draw_wells_1d(const ModelSpec1D& spec) {
  ModelRng rng(spec.seed);
  std::vector<Well> wells(static_cast<std::size_t>(spec.n_wells));
  for (int i = 0; i < spec.n_wells; ++i) wells[i].x = (i + 0.5) * spec.length_per_well;
  for (auto& w : wells) w.height = rng.normal(spec.height_mean, spec.height_std);
  for (auto& w : wells) w.width = rng.normal(spec.width_mean, spec.width_std);
  for (const auto& w : wells) {
    if (!(w.width > 0)) throw InputError("draw_wells_1d: non-positive well width drawn");
  }
  return wells;
}

std::vector<Well> draw_wells_2d(const ModelSpec2D& spec) {
  const int wx = spec.resolved_wells_x();
  const int wy = spec.resolved_wells_y();
  const double lx = spec.h * static_cast<double>(spec.nx);
  const double ly = spec.h * static_cast<double>(spec.ny);
  ModelRng rng(spec.seed);
  std::vector<Well> wells(static_cast<std::size_t>(wx) * wy);
  for (int j = 0; j < wy; ++j) {
    for (int i = 0; i < wx; ++i) {
      auto& w = wells[static_cast<std::size_t>(j) * wx + i];
      w.x = (i + 0.5) * lx / wx;
      w.y = (j + 0.5) * ly / wy;
    }
  }
  for (auto& w : wells) w.height = rng.normal(spec.height_mean, spec.height_std);
  for (auto& w : wells) w.width = rng.normal(spec.width_mean, spec.width_std);
  for (auto& w : wells) {
    w.x += rng.normal(0.0, spec.position_std);
    w.y += rng.normal(0.0, spec.position_std);
  }
  for (const auto& w : wells) {
    if (!(w.width > 0)) throw InputError("draw_wells_2d: non-positive well width drawn");
  }
  return wells;
}

std::vector<double> potential_1d(const ModelSpec1D& spec) {
  const Index n = spec.grid_size();
  const double len = spec.length();
  const auto wells = draw_wells_1d(spec);
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * spec.h;
    double s = 0.0;
    for (const auto& w : wells) s -= w.height * std::exp(-periodic_distance(x, w.x, len) / w.width);
    v[static_cast<std::size_t>(i)] = s;
  }
  return v;
}

std::vector<double> potential_2d(const ModelSpec2D& spec) {
  if (spec.nx < 1 || spec.ny < 1) throw InputError("ModelSpec2D: grid must be non-empty");
  if (!(spec.h > 0)) throw InputError("ModelSpec2D: h must be positive");
  const double lx = spec.h * static_cast<double>(spec.nx);
  const double ly = spec.h * static_cast<double>(spec.ny);
  const auto wells = draw_wells_2d(spec);
  std::vector<double> v(static_cast<std::size_t>(spec.nx * spec.ny), 0.0);
  for (Index iy = 0; iy < spec.ny; ++iy) {
    for (Index ix = 0; ix < spec.nx; ++ix) {
      const double x = static_cast<double>(ix) * spec.h;
      const double y = static_cast<double>(iy) * spec.h;
      double s = 0.0;
      for (const auto& w : wells) {
        const double dx = periodic_distance(x, w.x, lx);
        const double dy = periodic_distance(y, w.y, ly);
        s -= w.height * std::exp(-std::hypot(dx, dy) / w.width);
      }
      v[static_cast<std::size_t>(iy * spec.nx + ix)] = s;
    }
  }
  return v;
}

SparseHermitian generate_1d(const ModelSpec1D& spec) {
  const Index n = spec.grid_size();
  const auto v = potential_1d(spec);
  const double off = -spec.kinetic_scale / (spec.h * spec.h);
  const double diag = 2.0 * spec.kinetic_scale / (spec.h * spec.h);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(3 * n));
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, diag + v[static_cast<std::size_t>(i)]});
    if (n > 1) {
      // Upper link only; symmetric storage mirrors it. For n == 2 both
      // neighbours coincide and the two links add.
      t.push_back({i, (i + 1) % n, off});
    }
  }
  return SparseHermitian::from_triplets(n, t, /*symmetric_storage=*/true);
}

SparseHermitian generate_2d(const ModelSpec2D& spec) {
  const auto v = potential_2d(spec);
  const Index nx = spec.nx;
  const Index ny = spec.ny;
  const Index n = nx * ny;
  const double off = -spec.kinetic_scale / (spec.h * spec.h);
  const double diag = 4.0 * spec.kinetic_scale / (spec.h * spec.h);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(5 * n));
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      const Index p = iy * nx + ix;
      t.push_back({p, p, diag + v[static_cast<std::size_t>(p)]});
      if (nx > 1) t.push_back({p, iy * nx + (ix + 1) % nx, off});
      if (ny > 1) t.push_back({p, ((iy + 1) % ny) * nx + ix, off});
    }
  }
  return SparseHermitian::from_triplets(n, t, /*symmetric_storage=*/true);
}

}  // namespace lss
