// Microbenchmarks for the hot paths: distance fields, ball queries, energy
// evaluation, and the two capacity solver routes. Run manually, e.g.
//   ./bench_solver --benchmark_min_time=0.5

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "greenlab/capacity.hpp"
#include "greenlab/energy.hpp"
#include "greenlab/space.hpp"

using namespace greenlab;

namespace {

// Meshes are expensive to build; share one instance per denominator.
const MetricMeasureSpace& grid2d(int denom) {
    static std::map<int, MetricMeasureSpace> cache;
    auto it = cache.find(denom);
    if (it == cache.end())
        it = cache.emplace(denom, build_grid(2, 0.5, 1.0 / denom, 0.0)).first;
    return it->second;
}

CapacityProblem annulus(const MetricMeasureSpace& X, double r, double R,
                        double p) {
    const int c = nearest_vertex(X, {0.0, 0.0, 0.0});
    const auto dist = distances_from(X, c);
    CapacityProblem pr;
    pr.p = p;
    pr.core = closed_ball_core(X, dist, r);
    for (int v = 0; v < X.vertexCount(); ++v)
        if (dist[v] < R) pr.domain.push_back(v);
    return pr;
}

void BM_DistanceField(benchmark::State& state) {
    const MetricMeasureSpace& X = grid2d(static_cast<int>(state.range(0)));
    const int c = nearest_vertex(X, {0.0, 0.0, 0.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(distances_from(X, c));
    state.SetItemsProcessed(state.iterations() * X.vertexCount());
}
BENCHMARK(BM_DistanceField)->Arg(64)->Arg(128)->Arg(256);

void BM_BallQuery(benchmark::State& state) {
    const MetricMeasureSpace& X = grid2d(static_cast<int>(state.range(0)));
    const int c = nearest_vertex(X, {0.0, 0.0, 0.0});
    const auto dist = distances_from(X, c);
    for (auto _ : state)
        benchmark::DoNotOptimize(ball(X, dist, c, 0.25));
}
BENCHMARK(BM_BallQuery)->Arg(128)->Arg(256);

void BM_PEnergy(benchmark::State& state) {
    const MetricMeasureSpace& X = grid2d(256);
    std::vector<double> u(X.vertexCount());
    for (int v = 0; v < X.vertexCount(); ++v)
        u[v] = X.coords[v][0] * X.coords[v][1];
    EnergyConfig cfg;
    cfg.p = state.range(0) / 10.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(p_energy(X, u, cfg));
    state.SetItemsProcessed(state.iterations() * X.edgeCount());
}
BENCHMARK(BM_PEnergy)->Arg(20)->Arg(30);

void BM_CapacityDirect(benchmark::State& state) {
    const MetricMeasureSpace& X = grid2d(static_cast<int>(state.range(0)));
    const CapacityProblem pr = annulus(X, 0.0625, 0.25, 2.0);
    EnergyConfig cfg;
    cfg.tolRel = 1e-8;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_capacity(X, pr, cfg));
}
BENCHMARK(BM_CapacityDirect)->Arg(32)->Arg(64)->Arg(128)
    ->Unit(benchmark::kMillisecond);

void BM_CapacityContinuation(benchmark::State& state) {
    const MetricMeasureSpace& X = grid2d(static_cast<int>(state.range(0)));
    const CapacityProblem pr = annulus(X, 0.0625, 0.25, 3.0);
    EnergyConfig cfg;
    cfg.p = 3.0;
    cfg.tolRel = 1e-6;
    cfg.maxIter = 400;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_capacity(X, pr, cfg));
}
BENCHMARK(BM_CapacityContinuation)->Arg(32)->Arg(64)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
