// Serial reference kernels against the OpenMP kernels on the same fields.
// Run with OMP_NUM_THREADS set to compare scaling, e.g.
//   OMP_NUM_THREADS=4 ./ksns_bench --benchmark_filter=step_n

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "ksns/grid.hpp"
#include "ksns/reference.hpp"
#include "ksns/sensitivity.hpp"
#include "ksns/transport.hpp"

namespace {

using namespace ksns;

struct Fields {
  Grid grid;
  ScalarField n, c;
  VectorField u;
  SensitivitySpec spec;
  RegularizationParams reg;
};

Fields make_fields(int cells, int dim) {
  const std::vector<double> L(dim, 1.0);
  const std::vector<int> N(dim, cells);
  Fields f{make_grid(dim, L, N), {}, {}, {}, {}, {}};
  f.n = ScalarField(f.grid);
  f.c = ScalarField(f.grid);
  f.u = VectorField(f.grid);
  for (std::size_t i = 0; i < f.n.values.size(); ++i) {
    const Point x = f.grid.cell_center(f.grid.cell_coords(i));
    f.n.values[i] = 1.0 + 0.5 * std::cos(std::numbers::pi * x[0]) * std::cos(std::numbers::pi * x[1]);
    f.c.values[i] = 1.0 + 0.3 * std::cos(2 * std::numbers::pi * x[0]);
  }
  for (int d = 0; d < dim; ++d)
    for (auto& v : f.u.comp[d]) v = 0.1 * (d + 1);
  zero_boundary_faces(f.u);
  f.spec = SensitivitySpec::make(SensitivityKind::scalar_saturating, 0.3, 1.0);
  f.reg = make_regularization(0.1, f.grid);
  return f;
}

void args(benchmark::internal::Benchmark* b) {
  b->Args({64, 2})->Args({256, 2})->Args({32, 3})->Unit(benchmark::kMicrosecond);
}

void BM_laplacian_reference(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::laplacian(f.n));
}
void BM_laplacian_parallel(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(laplacian_neumann(f.n));
}

void BM_gradient_reference(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::gradient(f.n));
}
void BM_gradient_parallel(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(gradient_cc(f.n));
}

void BM_chemotactic_flux_reference(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::chemotactic_flux(f.n, f.c, f.spec, f.reg));
}
void BM_chemotactic_flux_parallel(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const ChemotacticFlux chemo(f.grid, f.spec, f.reg);
  for (auto _ : st) benchmark::DoNotOptimize(chemo(f.n, f.c));
}

void BM_step_n_reference(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const double dt = 0.1 * f.grid.spacing[0] * f.grid.spacing[0];
  for (auto _ : st) benchmark::DoNotOptimize(reference::step_n(f.n, f.c, f.u, f.spec, f.reg, dt));
}
void BM_step_n_parallel(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const ChemotacticFlux chemo(f.grid, f.spec, f.reg);
  const double dt = 0.1 * f.grid.spacing[0] * f.grid.spacing[0];
  for (auto _ : st) benchmark::DoNotOptimize(step_n(f.n, f.c, f.u, chemo, dt));
}

void BM_integrate_reference(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::integrate(f.n));
}
void BM_integrate_parallel(benchmark::State& st) {
  const Fields f = make_fields(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(integrate(f.n));
}

}  // namespace

BENCHMARK(BM_laplacian_reference)->Apply(args);
BENCHMARK(BM_laplacian_parallel)->Apply(args);
BENCHMARK(BM_gradient_reference)->Apply(args);
BENCHMARK(BM_gradient_parallel)->Apply(args);
BENCHMARK(BM_chemotactic_flux_reference)->Apply(args);
BENCHMARK(BM_chemotactic_flux_parallel)->Apply(args);
BENCHMARK(BM_step_n_reference)->Apply(args);
BENCHMARK(BM_step_n_parallel)->Apply(args);
BENCHMARK(BM_integrate_reference)->Apply(args);
BENCHMARK(BM_integrate_parallel)->Apply(args);

BENCHMARK_MAIN();
