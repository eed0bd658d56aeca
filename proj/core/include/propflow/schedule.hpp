#ifndef PROPFLOW_SCHEDULE_HPP
#define PROPFLOW_SCHEDULE_HPP

#include <vector>

namespace propflow {

// Per-layer step sizes. Layer d (last offline layer) carries the largest
// epsilon; each earlier layer shrinks by 2n so that weight decreases deeper
// in the graph can be offset one layer up.
struct EpsilonSchedule {
    std::vector<double> per_layer;  // per_layer[j-1] = eps_j, ascending
    double top_epsilon = 0;         // the user target the schedule was built from
    double eps_min = 0;             // eps_1
    double eps_max = 0;             // eps_d

    int depth() const { return static_cast<int>(per_layer.size()); }
    double at(int layer) const { return per_layer[layer - 1]; }
};

// eps_d = eps / d, then eps_j = eps_{j+1} / (2n) going down. Throws
// UnderflowRisk when eps_1 would drop under 1e-12.
EpsilonSchedule make_schedule(int d, int n, double eps);

// Single-layer schedule with eps_1 = eps (the bipartite case).
EpsilonSchedule flat_schedule(double eps);

}  // namespace propflow

#endif
