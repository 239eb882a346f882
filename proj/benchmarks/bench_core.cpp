#include <benchmark/benchmark.h>

#include "splash2d/flux.hpp"
#include "splash2d/linsolve.hpp"
#include "splash2d/picard.hpp"
#include "splash2d/stress.hpp"

using namespace splash2d;

namespace {

struct Fixture {
    InterfaceCurve curve = make_circle({2.0, 0.0}, 0.7, 64);
    Grid grid = build_reference_grid(curve, 24);
    BranchMap map{{0.0, 0.0}, {-1.0, 0.0}};
    Params params;
    VecField v0;
    SymField T0;

    Fixture() {
        params.grid_n = 64;
        v0.resize(static_cast<std::size_t>(grid.nnodes()));
        T0.assign(static_cast<std::size_t>(grid.nnodes()), Sym2{0.1, 0.0, 0.1});
        for (int n = 0; n < grid.nnodes(); ++n) {
            const Vec2 z = map.inverse(grid.nodes[static_cast<std::size_t>(n)]);
            v0[static_cast<std::size_t>(n)] = 0.2 * perp(z);
        }
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

static void BM_ConformalJacobian(benchmark::State& state) {
    const Fixture& f = fixture();
    std::size_t n = 0;
    for (auto _ : state) {
        const Vec2 zt = f.grid.nodes[n % f.grid.nodes.size()];
        benchmark::DoNotOptimize(f.map.jacobian(zt));
        ++n;
    }
}
BENCHMARK(BM_ConformalJacobian);

static void BM_GradVec(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(grad_vec(f.grid, f.v0));
}
BENCHMARK(BM_GradVec);

static void BM_AdvanceFlux(benchmark::State& state) {
    const Fixture& f = fixture();
    const VecField X = identity_flux(f.grid);
    for (auto _ : state) benchmark::DoNotOptimize(advance_flux(f.map, X, f.v0, 1e-3));
}
BENCHMARK(BM_AdvanceFlux);

static void BM_AdvanceStress(benchmark::State& state) {
    const Fixture& f = fixture();
    const VecField X = identity_flux(f.grid);
    const TensorField zeta(static_cast<std::size_t>(f.grid.nnodes()), Mat2::identity());
    for (auto _ : state)
        benchmark::DoNotOptimize(
            advance_stress(f.grid, f.map, f.T0, f.v0, X, zeta, f.params, 1e-3));
}
BENCHMARK(BM_AdvanceStress);

static void BM_LinearStep(benchmark::State& state) {
    const Fixture& f = fixture();
    LinearSolver solver(f.grid, f.map, f.params, 5e-3);
    LinearRHS rhs;
    rhs.f = zero_vec(f.grid);
    rhs.g = zero_scalar(f.grid);
    rhs.h.assign(static_cast<std::size_t>(f.grid.nb), Vec2{});
    rhs.v0 = zero_vec(f.grid);
    for (auto _ : state) benchmark::DoNotOptimize(solver.step(rhs, f.v0));
}
BENCHMARK(BM_LinearStep);

static void BM_PicardSweep(benchmark::State& state) {
    const Fixture& f = fixture();
    const PicardContext ctx = make_picard_context(f.grid, f.map, f.params, f.v0, f.T0,
                                                  identity_flux(f.grid), 0.05);
    const IterationState seed = seed_state(ctx);
    for (auto _ : state) benchmark::DoNotOptimize(picard_sweep(ctx, seed));
}
BENCHMARK(BM_PicardSweep);

BENCHMARK_MAIN();
