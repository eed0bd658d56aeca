#include <benchmark/benchmark.h>

#include "propflow/distances.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/generators.hpp"
#include "propflow/max_flow.hpp"
#include "propflow/load_balancing.hpp"
#include "propflow/online.hpp"
#include "propflow/weights.hpp"

using namespace propflow;

namespace {

DagInstance layered_instance(int depth, int width, std::uint64_t seed) {
    Rng rng(seed);
    LayeredGenParams params;
    params.depth = depth;
    params.max_per_layer = width;
    params.types = width;
    params.max_count = 12;
    return random_layered_instance(params, rng);
}

void BM_weight_iterations(benchmark::State& state) {
    auto inst = layered_instance(static_cast<int>(state.range(0)), 4, 99);
    auto dist = longest_distances(inst);
    auto layered = reduce_to_layered(inst, dist);
    auto schedule = make_schedule(layered.d, static_cast<int>(layered.max_layer_size), 0.25);
    WeightRunOptions opts;
    opts.max_iterations = 500;
    opts.early_exit = false;
    for (auto _ : state) {
        auto result = d_layer_weights(layered, schedule, opts);
        benchmark::DoNotOptimize(result.decrements.data());
    }
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_weight_iterations)->Arg(2)->Arg(3)->Arg(4);

void BM_max_flow_oracle(benchmark::State& state) {
    Rng rng(7);
    DagGenParams params;
    params.nodes = static_cast<int>(state.range(0));
    auto inst = random_dag_instance(params, rng);
    for (auto _ : state) {
        auto result = max_flow_oracle(inst);
        benchmark::DoNotOptimize(result.opt_value.num());
    }
}
BENCHMARK(BM_max_flow_oracle)->Arg(6)->Arg(8);

void BM_route_dag(benchmark::State& state) {
    auto inst = layered_instance(3, 4, 17);
    auto dist = longest_distances(inst);
    auto layered = reduce_to_layered(inst, dist);
    auto schedule = make_schedule(layered.d, static_cast<int>(layered.max_layer_size), 0.25);
    WeightRunOptions opts;
    opts.max_iterations = 200;
    auto ws = d_layer_weights(layered, schedule, opts);
    auto weights = transfer_to_dag(ws, layered, dist);
    for (auto _ : state) {
        auto report = route_dag(inst, weights, dist);
        benchmark::DoNotOptimize(report.value);
    }
}
BENCHMARK(BM_route_dag);

void BM_simulate_maximal(benchmark::State& state) {
    auto inst = layered_instance(2, 4, 23);
    auto dist = longest_distances(inst);
    auto layered = reduce_to_layered(inst, dist);
    auto schedule = make_schedule(layered.d, static_cast<int>(layered.max_layer_size), 0.25);
    WeightRunOptions opts;
    opts.max_iterations = 200;
    auto ws = d_layer_weights(layered, schedule, opts);
    auto weights = transfer_to_dag(ws, layered, dist);
    ArrivalTrace trace;
    Rng rng(29);
    for (const auto& t : inst.impression_types) {
        for (std::int64_t k = 0; k < t.count.num(); ++k) trace.arrivals.push_back(t.id);
    }
    rng.shuffle(trace.arrivals);
    for (auto _ : state) {
        auto result = simulate_maximal(inst, weights, dist, trace);
        benchmark::DoNotOptimize(result.value);
    }
    state.SetItemsProcessed(state.iterations() * trace.arrivals.size());
}
BENCHMARK(BM_simulate_maximal);

void BM_opt_makespan(benchmark::State& state) {
    Rng rng(31);
    ScheduleGenParams params;
    params.machines = 4;
    params.jobs = 20;
    auto inst = random_schedule_instance(params, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(opt_makespan(inst));
    }
}
BENCHMARK(BM_opt_makespan);

}  // namespace

BENCHMARK_MAIN();
