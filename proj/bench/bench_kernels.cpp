// Serial reference kernels against their OpenMP versions on the 1D model.
// Argument: number of wells (n = 200 * wells, one element per wells).
#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include <omp.h>

#include "lss/model.hpp"
#include "lss/pipeline.hpp"
#include "lss/serial.hpp"

using namespace lss;

namespace {

struct Fixture {
  SparseHermitian a;
  Partition p;
  SliceParams params;
  LssBasis basis;
  ProjectedPencil pencil;
  Matrix c;
  Vector theta;
  Matrix block;
};

const Fixture& fixture(int wells) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[wells];
  if (!slot) {
    auto f = std::make_unique<Fixture>();
    ModelSpec1D spec;
    spec.n_wells = wells;
    f->a = generate_1d(spec);
    f->p = partition_structured_1d(f->a.size(), wells);
    SliceOptions o;
    o.params.mu = 2.0;
    o.params.tau = 0.032;
    f->params = o.params;
    SliceRun run = run_slice(f->a, f->p, o);
    f->basis = std::move(run.basis);
    f->pencil = std::move(run.pencil);
    f->c = run.result.c;
    f->theta = Eigen::Map<const Vector>(run.result.theta.data(), static_cast<Index>(run.result.theta.size()));
    f->block = Matrix::Random(f->a.size(), 64);
    slot = std::move(f);
  }
  return *slot;
}

void set_counters(benchmark::State& state, bool parallel) {
  state.counters["threads"] = parallel ? omp_get_max_threads() : 1;
}

template <bool Parallel>
void BM_spmm(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Matrix y = Parallel ? lss::spmm(f.a, f.block) : serial::spmm(f.a, f.block);
    benchmark::DoNotOptimize(y.data());
  }
  set_counters(state, Parallel);
}

template <bool Parallel>
void BM_basis(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    LssBasis b = Parallel ? lss::build_lss_basis(f.a, f.p, f.params) : serial::build_lss_basis(f.a, f.p, f.params);
    benchmark::DoNotOptimize(b.n_b);
  }
  set_counters(state, Parallel);
}

template <bool Parallel>
void BM_assembly(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    ProjectedPencil pp = Parallel ? lss::assemble_pencil(f.a, f.p, f.basis) : serial::assemble_pencil(f.a, f.p, f.basis);
    benchmark::DoNotOptimize(pp.n_b);
  }
  set_counters(state, Parallel);
}

template <bool Parallel>
void BM_residuals(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? lss::residual_norms_global(f.a, f.basis, f.p, f.c, f.theta)
                      : serial::residual_norms_global(f.a, f.basis, f.p, f.c, f.theta);
    benchmark::DoNotOptimize(r.data());
  }
  set_counters(state, Parallel);
}

}  // namespace

BENCHMARK(BM_spmm<false>)->Name("spmm/serial")->Arg(8)->Arg(16);
BENCHMARK(BM_spmm<true>)->Name("spmm/omp")->Arg(8)->Arg(16);
BENCHMARK(BM_basis<false>)->Name("basis/serial")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_basis<true>)->Name("basis/omp")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assembly<false>)->Name("assembly/serial")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assembly<true>)->Name("assembly/omp")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_residuals<false>)->Name("residuals/serial")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_residuals<true>)->Name("residuals/omp")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
