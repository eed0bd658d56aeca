#ifndef PROPFLOW_WEIGHTS_HPP
#define PROPFLOW_WEIGHTS_HPP

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "propflow/layered.hpp"
#include "propflow/schedule.hpp"

namespace propflow {

// Weights are stored as integer decrement counts; the implied weight of
// node v is (1 + eps_layer(v))^(-k_v). Counts stay exact where repeated
// float division would drift.
struct WeightState {
    std::vector<int> decrements;  // k_v, indexed like the graph the run used
    EpsilonSchedule schedule;
    long long iterations_run = 0;
    long long max_iterations = 0;  // T
    bool fixed_point = false;

    long long level(std::size_t v) const { return max_iterations - decrements[v]; }
};

// Per-iteration record handed to the instrumented-mode observer.
// alloc_before/after are Alloc at the end of iterations t-1 and t.
struct IterationRecord {
    long long iteration = 0;
    const std::vector<double>* alloc_before = nullptr;
    const std::vector<double>* alloc_after = nullptr;
    const std::vector<bool>* decreased = nullptr;
    const std::vector<int>* decrements = nullptr;
};
using IterationObserver = std::function<void(const IterationRecord&)>;

struct WeightRunOptions {
    long long max_iterations = 0;  // 0 = default_layered_iterations
    long long hard_cap = 1000000;
    bool early_exit = true;  // stop at the first zero-decrement iteration
    IterationObserver observer;
};

// Default iteration budget: ceil(n * ln(n / eps_max) / (eps_max * eps_min)).
long long default_layered_iterations(std::size_t n, const EpsilonSchedule& schedule);

// The forced-decrease rule. True iff every maximum-weight out-neighbor of
// `a` decreased this iteration and sits within the level-gap threshold.
// Neighbor weights are compared by decrement count, which is exact.
bool cond(const LayeredGraph& g, std::size_t a, const std::vector<int>& decrements,
          const std::vector<bool>& decreased_this_iteration, double level_gap_threshold);

double level_gap_threshold(std::size_t n, const EpsilonSchedule& schedule);

// Reverse-sweep framework on a layered graph: layer j self-decreases above
// prod_{j'<=j}(1+eps_j') * C, other layers may also be forced down by cond
// against layer j+1. Sweep order d..1; cond sees the decrease flags already
// set in the same sweep.
WeightState d_layer_weights(const LayeredGraph& g, const EpsilonSchedule& schedule,
                            const WeightRunOptions& options = {});

// The I/A/B special case; requires exactly two offline layers.
WeightState three_layer_weights(const LayeredGraph& g, const EpsilonSchedule& schedule,
                                const WeightRunOptions& options = {});

// ---- bipartite (one offline layer) ----

struct BipartiteView {
    std::vector<std::string> ids;
    std::vector<double> capacity;
    std::vector<std::vector<std::size_t>> type_neighbors;
    std::vector<double> type_count;
};

// Requires every offline node's out-neighborhood to be exactly the sink.
BipartiteView bipartite_view(const DagInstance& instance);

struct BipartiteOptions {
    long long max_iterations = 0;   // 0 = ceil((2/eps^2) ln(n/eps))
    long long hard_cap = 1000000;
    bool early_exit = true;
    double threshold_factor = 0;    // 0 = (1+eps); trigger at factor * C
    double weight_base = 0;         // 0 = (1+eps); weight = base^(-k)
    bool strict_compare = false;    // bi_prop_alg triggers on >=
};

// T rounds of: proportional Alloc, then decrement every advertiser at or
// above (1+eps) C. Decrement counts come back in a flat-schedule WeightState.
WeightState bipartite_weights(const BipartiteView& view, double eps,
                              const BipartiteOptions& options = {});

long long default_bipartite_iterations(std::size_t n, double eps);

// ---- transfer back to the DAG ----

struct DagWeights {
    std::map<std::string, double> weight_log;  // natural log of the real copy's weight
    double rho_base = 0;                       // 2n from the layered run
    std::vector<double> layer_epsilons;        // empty for externally supplied weights
    double max_chain_drift = 0;  // max deviation of log-weight ratios from 1/(2n)

    double log_of(const std::string& id) const {
        auto it = weight_log.find(id);
        return it == weight_log.end() ? 0.0 : it->second;
    }
};

// Reads each copy chain, requires equal decrement counts along it
// (DependenceViolated otherwise), and takes the real copy's weight as the
// node weight. The deviation of consecutive-copy log ratios from 1/(2n) is
// recorded as drift.
DagWeights transfer_to_dag(const WeightState& state, const LayeredGraph& g,
                           const DistanceMap& dist);

// log-weight vector over layered nodes implied by a WeightState
std::vector<double> layered_log_weights(const LayeredGraph& g, const WeightState& state);

// ---- weight files ----

void save_weight_state(const WeightState& state, const LayeredGraph& g, std::ostream& out);
WeightState load_weight_state(const LayeredGraph& g, std::istream& in);

void save_dag_weights(const DagWeights& w, std::ostream& out);
DagWeights load_dag_weights(std::istream& in);

}  // namespace propflow

#endif
