#include "plateau/kernels.hpp"
#include "plateau/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace plateau;

namespace {

struct Fixture {
    GridTopology topo;
    std::vector<double> u;
    GridDerivatives jets;

    explicit Fixture(int n) : topo(build_grid(Domain::star(1.0, 0.1, 3, n, 2 * n))) {
        u.resize(topo.node_count);
        for (int p = 0; p < topo.node_count; ++p) {
            const Vec x = topo.position(p);
            u[p] = std::sqrt(1.44 - x.squaredNorm()) - 0.5 * 1.2 + 0.02;
        }
        jets = differentiate(topo, u);
    }
};

const Fixture& fixture(int n) {
    static const Fixture f32(32);
    static const Fixture f64(64);
    static const Fixture f128(128);
    return n == 32 ? f32 : (n == 64 ? f64 : f128);
}

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::openmp; }

void BM_values(benchmark::State& state) {
    const auto& f = fixture(static_cast<int>(state.range(0)));
    const auto spec = CurvatureSpec::quotient(2, 1);
    std::vector<kernels::NodeValue> out(f.topo.interior_count);
    for (auto _ : state) {
        kernels::evaluate_values(exec_of(state), spec, f.u, f.jets, f.topo.interior_count, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * f.topo.interior_count);
}

void BM_linearization(benchmark::State& state) {
    const auto& f = fixture(static_cast<int>(state.range(0)));
    const auto spec = CurvatureSpec::quotient(2, 1);
    std::vector<kernels::NodeLinearization> out(f.topo.interior_count);
    for (auto _ : state) {
        kernels::evaluate_linearization(exec_of(state), spec, f.u, f.jets, f.topo.interior_count, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * f.topo.interior_count);
}

void BM_residual(benchmark::State& state) {
    const auto& f = fixture(static_cast<int>(state.range(0)));
    const GridFunction u{f.u, 0.02};
    for (auto _ : state) {
        benchmark::DoNotOptimize(residual(f.topo, u, CurvatureSpec::mean(2), 0.5, exec_of(state)));
    }
}

// second argument: 0 serial, 1 OpenMP
void grid_args(benchmark::internal::Benchmark* b) {
    for (int n : {32, 64, 128}) {
        b->Args({n, 0});
        b->Args({n, 1});
    }
}

}  // namespace

BENCHMARK(BM_values)->Apply(grid_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_linearization)->Apply(grid_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_residual)->Apply(grid_args)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
