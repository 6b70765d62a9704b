// Exploration-term kernels: brute-force reference vs serial vs OpenMP.

#include <benchmark/benchmark.h>

#include <memory>

#include "beam/kernels.hpp"
#include "beam/reference.hpp"
#include "beam/rng.hpp"

namespace {

using namespace beam;

struct Instance {
    ParameterSpace space;
    SurrogateSettings settings;
    std::vector<Evidence> evidence;
    std::vector<GridIndex> pool;
};

Instance make_instance(int side, Neighborhood neighborhood, std::size_t pool_size)
{
    Instance inst{ParameterSpace({AxisSpec("x", 0, side - 1, 1), AxisSpec("y", 0, side - 1, 1)}),
                  {5, 0.05, neighborhood},
                  {},
                  {}};
    const std::uint64_t n = inst.space.cardinality();
    Rng rng(42);
    std::vector<char> taken(n, 0);
    while (inst.evidence.size() < 40) {
        const GridIndex i = rng.below(n);
        if (!taken[i]) {
            taken[i] = 1;
            inst.evidence.push_back({i, inst.evidence.size() % 8 == 0 ? 1.0 : 0.0});
        }
    }
    for (GridIndex i = 0; i < n && inst.pool.size() < pool_size; i += 1 + n / pool_size / 2) {
        if (!taken[i]) {
            inst.pool.push_back(i);
        }
    }
    return inst;
}

void run_kernel(benchmark::State& state, Neighborhood neighborhood, Execution execution)
{
    const auto inst = make_instance(static_cast<int>(state.range(0)), neighborhood,
                                    static_cast<std::size_t>(state.range(1)));
    const Surrogate model(inst.space, inst.settings, inst.evidence);
    const auto geo =
        std::make_shared<const PoolGeometry>(inst.space, inst.pool, inst.settings.k, neighborhood, execution);
    const PoolPosterior post(model, geo, {}, execution);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::exploration(post, 9, execution));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.pool.size()));
}

void run_reference(benchmark::State& state, Neighborhood neighborhood)
{
    const auto inst = make_instance(static_cast<int>(state.range(0)), neighborhood,
                                    static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::exploration(inst.space, inst.settings, inst.evidence, inst.pool, 9));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.pool.size()));
}

void BM_ReferenceSpace(benchmark::State& s) { run_reference(s, Neighborhood::space); }
void BM_SerialSpace(benchmark::State& s) { run_kernel(s, Neighborhood::space, Execution::serial); }
void BM_ParallelSpace(benchmark::State& s) { run_kernel(s, Neighborhood::space, Execution::parallel); }
void BM_ReferenceObserved(benchmark::State& s) { run_reference(s, Neighborhood::observed); }
void BM_SerialObserved(benchmark::State& s) { run_kernel(s, Neighborhood::observed, Execution::serial); }
void BM_ParallelObserved(benchmark::State& s) { run_kernel(s, Neighborhood::observed, Execution::parallel); }

}  // namespace

// The reference refits from scratch per hypothetical, so it only gets the small size.
BENCHMARK(BM_ReferenceSpace)->Args({30, 200})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerialSpace)->Args({30, 200})->Args({300, 20000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelSpace)->Args({30, 200})->Args({300, 20000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReferenceObserved)->Args({30, 200})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerialObserved)->Args({30, 200})->Args({300, 20000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelObserved)->Args({30, 200})->Args({300, 20000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
