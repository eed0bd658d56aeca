#ifndef PROPFLOW_GENERATORS_HPP
#define PROPFLOW_GENERATORS_HPP

#include <cstdint>

#include "propflow/instance.hpp"
#include "propflow/learning.hpp"
#include "propflow/load_balancing.hpp"
#include "propflow/rng.hpp"

namespace propflow {

struct BipartiteGenParams {
    int advertisers = 4;
    int types = 4;
    std::int64_t max_capacity = 6;
    std::int64_t max_count = 20;
    std::int64_t min_capacity = 1;
};

DagInstance random_bipartite_instance(const BipartiteGenParams& params, Rng& rng);

struct LayeredGenParams {
    int depth = 3;              // offline layers
    int max_per_layer = 4;
    int types = 4;
    std::int64_t max_capacity = 6;
    std::int64_t max_count = 8;
    std::int64_t min_capacity = 1;
};

// Strictly layered instance: every edge steps one layer, impressions point
// only at the first layer, and every node's longest distance matches its
// layer (the reduction is the identity up to sink copies).
DagInstance random_layered_instance(const LayeredGenParams& params, Rng& rng);

struct DagGenParams {
    int nodes = 6;
    int types = 4;
    std::int64_t max_capacity = 6;
    std::int64_t max_count = 8;
    double extra_edge_prob = 0.35;  // forward skip edges make the reduction non-trivial
};

DagInstance random_dag_instance(const DagGenParams& params, Rng& rng);

struct ScheduleGenParams {
    int machines = 3;
    int jobs = 10;
    std::int64_t max_size = 5;
};

ScheduleInstance random_schedule_instance(const ScheduleGenParams& params, Rng& rng);

struct LearnFlowSetup {
    DagInstance skeleton;       // counts zero; capacities satisfy the floor
    TypeDistribution dist;
    std::int64_t capacity_floor = 0;
};

// Bipartite learnability setup: capacities at the sample-complexity floor
// ceil((2/eps^2) ln(1/eps)) and m close to the total capacity.
LearnFlowSetup random_learnable_bipartite(int advertisers, double eps, Rng& rng);

// Layered variant (depth offline layers); capacities at the floor, and the
// caller must verify the optimal min-load with the oracle before using it.
LearnFlowSetup random_learnable_layered(double eps, Rng& rng, int depth = 3);

struct LearnLbSetup {
    int machines = 3;
    int jobs = 60;
    std::vector<std::vector<std::vector<int>>> slot_neighborhoods;  // per job: choices
    std::vector<std::vector<double>> slot_probs;

    ScheduleInstance sample(Rng& rng) const;  // unit-size jobs
};

LearnLbSetup random_learnable_schedule(int machines, int jobs, Rng& rng);

}  // namespace propflow

#endif
