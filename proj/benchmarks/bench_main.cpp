#include "pinflow/homog.hpp"
#include "pinflow/metrics.hpp"
#include "pinflow/particles.hpp"
#include "pinflow/poisson.hpp"
#include "pinflow/spectral.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace pinflow;

namespace {

VortexEnsemble blob_ensemble(std::size_t n) {
    BlobSpec b;
    b.count = n;
    b.radius = 0.3;
    b.sampler = BlobSampler::sunflower;
    VortexEnsemble ens;
    ens.positions = sample_blob(b);
    return ens;
}

ScalarField smooth_field(int n) {
    return ScalarField::sample(Grid2D::unit_torus(n), [](Vec2 x) {
        return std::sin(2 * std::numbers::pi * x.x) * std::cos(4 * std::numbers::pi * x.y);
    });
}

} // namespace

static void BM_InteractionForces(benchmark::State& state) {
    const VortexEnsemble ens = blob_ensemble(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(interaction_forces(ens));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_InteractionForces)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oNSquared);

static void BM_SpectralGradient(benchmark::State& state) {
    const ScalarField f = smooth_field(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gradient(f));
}
BENCHMARK(BM_SpectralGradient)->RangeMultiplier(2)->Range(64, 512);

static void BM_PeriodicPoisson(benchmark::State& state) {
    const ScalarField f = smooth_field(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(poisson_solve(f, PoissonMode::periodic_meanfree));
}
BENCHMARK(BM_PeriodicPoisson)->RangeMultiplier(2)->Range(64, 512);

static void BM_FreespacePoisson(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ScalarField f = ScalarField::sample(Grid2D::centered_box(n, 4.0), [](Vec2 x) { return std::exp(-8.0 * norm2(x)); });
    for (auto _ : state) benchmark::DoNotOptimize(poisson_solve(f, PoissonMode::freespace));
}
BENCHMARK(BM_FreespacePoisson)->RangeMultiplier(2)->Range(64, 256);

static void BM_InvariantMeasure(benchmark::State& state) {
    const PinningLandscape land(make_eggbox_cell(-1.0 / (2 * std::numbers::pi)));
    InvariantMeasureOptions opt;
    opt.resolution = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(viscous_invariant_measure(land, 1.0, 0.0, {0.4, 0.2}, 0.2, opt));
}
BENCHMARK(BM_InvariantMeasure)->RangeMultiplier(2)->Range(32, 128)->Unit(benchmark::kMillisecond);

static void BM_Deposit(benchmark::State& state) {
    const VortexEnsemble ens = blob_ensemble(static_cast<std::size_t>(state.range(0)));
    const Grid2D g = Grid2D::centered_box(256, 4.0);
    for (auto _ : state) benchmark::DoNotOptimize(deposit_empirical(ens, g, 0.05));
}
BENCHMARK(BM_Deposit)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK_MAIN();
