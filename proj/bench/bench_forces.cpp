// Serial reference assembly against the OpenMP engine on the desk-scale collision system.
//   bench_forces --benchmark_filter=Dg

#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>

#include "dgmd/io/config.hpp"
#include "dgmd/spatial/engine.hpp"
#include "dgmd/spatial/reference_forces.hpp"

using namespace dgmd;

namespace {

Experiment& collision() {
    static const auto e = load_experiment(std::filesystem::path(DGMD_CONFIG_DIR) / "collision_small.toml");
    return *e;
}

// A trial position a short flight ahead of the current one.
std::vector<Vec3> trial(const Experiment& e) {
    std::vector<Vec3> u = e.system.q;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += (e.run.tau / e.system.mass[i]) * e.system.p[i];
    return u;
}

std::unique_ptr<ForceProvider> provider(int ranks) {
    auto& e = collision();
    if (ranks == 0) return std::make_unique<ReferenceForces>(e.model());
    return std::make_unique<Engine>(e.model(), ranks);
}

// range(0): 0 for the serial reference, otherwise the simulated rank count
void Dg(benchmark::State& state) {
    auto& e = collision();
    auto forces = provider(static_cast<int>(state.range(0)));
    forces->prepare(e.system);
    const auto u = trial(e);
    for (auto _ : state) benchmark::DoNotOptimize(forces->discrete_gradient(e.system.q, u, {}));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(e.system.size()));
}

void JacobianFull(benchmark::State& state) {
    auto& e = collision();
    auto forces = provider(static_cast<int>(state.range(0)));
    forces->prepare(e.system);
    const auto u = trial(e);
    const std::vector<Vec3> v(u.size(), Vec3{0.1, -0.2, 0.3});
    for (auto _ : state)
        benchmark::DoNotOptimize(forces->jacobian_apply(JacobianMode::full, e.system.q, u, v, e.run.tau));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(e.system.size()));
}

void Prepare(benchmark::State& state) {
    auto& e = collision();
    auto forces = provider(static_cast<int>(state.range(0)));
    for (auto _ : state) forces->prepare(e.system);
}

} // namespace

BENCHMARK(Dg)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(JacobianFull)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(Prepare)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
