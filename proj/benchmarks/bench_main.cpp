#include "semiclassical/diagnostics.hpp"
#include "semiclassical/resummation.hpp"
#include "semiclassical/rs_oracle.hpp"
#include "semiclassical/transport.hpp"
#include "semiclassical/variational.hpp"

#include <benchmark/benchmark.h>

using namespace semiclassical;

namespace {

void BM_ExpandGroundQuartic(benchmark::State& state) {
    const auto model = kappa_model(2, 1, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(expand_ground(model, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ExpandGroundQuartic)->Arg(4)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ExpandGroundCoupled2D(benchmark::State& state) {
    PolySeries a(2, 4);
    a.set(MultiIndex{2, 2}, Rational(1, 4));
    a.set(MultiIndex{4, 0}, Rational(1));
    const auto model = make_model(1, {Rational(1), Rational(7, 5)}, a);
    for (auto _ : state) benchmark::DoNotOptimize(expand_ground(model, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ExpandGroundCoupled2D)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_TransportCouplingSeries(benchmark::State& state) {
    const auto model = kappa_model(static_cast<int>(state.range(0)), 1, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(transport_coupling_series(model, 1, 10));
}
BENCHMARK(BM_TransportCouplingSeries)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_RSExpand(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(rs_expand(2, 0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RSExpand)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_MinimizeAction(benchmark::State& state) {
    PolySeries a(2, 4);
    a.set(MultiIndex{2, 2}, Rational(1, 4));
    const auto model = make_model(1, {Rational(1), Rational(2)}, a);
    GridSpec grid;
    grid.nodes = static_cast<int>(state.range(0));
    const std::vector<double> x{1.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(minimize_action(model, x, grid));
}
BENCHMARK(BM_MinimizeAction)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ReferenceEnergy(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(oscillator_basis_level(2, 0, 0.1, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ReferenceEnergy)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_BorelPade(benchmark::State& state) {
    const auto c = transport_coupling_series(kappa_model(2, 1, 1, 1), 0, 11);
    for (auto _ : state) benchmark::DoNotOptimize(borel_pade(c, 0.1, 5, 5));
}
BENCHMARK(BM_BorelPade)->Unit(benchmark::kMicrosecond);

void BM_CorrectionDiagnostics(benchmark::State& state) {
    const auto model = kappa_model(2, 1, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(correction_diagnostics(model, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CorrectionDiagnostics)->Arg(8)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
