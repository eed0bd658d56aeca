#ifndef PROPFLOW_ONLINE_HPP
#define PROPFLOW_ONLINE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "propflow/distances.hpp"
#include "propflow/instance.hpp"
#include "propflow/weights.hpp"

namespace propflow {

struct ArrivalTrace {
    std::vector<std::string> arrivals;  // type ids in arrival order
};

void save_trace(const ArrivalTrace& trace, std::ostream& out);
ArrivalTrace load_trace(std::istream& in);

// Instance with type counts set to the trace's realized arrival counts.
DagInstance realized_instance(const DagInstance& instance, const ArrivalTrace& trace);

struct OnlineState {
    std::map<std::string, double> residual;  // per offline node
    std::set<std::string> blocked;           // full nodes, closed under dead ends
    double value = 0;                        // delivered so far; equals the gamma sum
    std::vector<double> gamma;               // delivered fraction per arrival
};

struct SimResult {
    double value = 0;
    OnlineState state;
};

enum class Policy { Direct, Maximal, Greedy };

const char* policy_name(Policy p);
std::optional<Policy> parse_policy(const std::string& name);

// Direct: every arrival routes its unit by the predicted proportions,
// saturation ignored; delivered value is the truncated recurrence at the
// realized counts. Gamma holds each arrival's marginal value.
SimResult simulate_direct(const DagInstance& instance, const DagWeights& weights,
                          const DistanceMap& dist, const ArrivalTrace& trace);

// Maximal: per arrival, repeatedly route the unsent remainder proportionally
// over the unblocked residual graph, scale the pattern by the largest
// feasible lambda, commit, and refresh the blocked closure. Ends with a
// maximal flow: unsatisfied arrivals have no residual path to the sink.
SimResult simulate_maximal(const DagInstance& instance, const DagWeights& weights,
                           const DistanceMap& dist, const ArrivalTrace& trace);

// Greedy integral baseline used by the adversary harness: one unit on the
// lexicographically first residual path, or nothing.
SimResult simulate_greedy_integral(const DagInstance& instance, const ArrivalTrace& trace);

SimResult simulate(Policy policy, const DagInstance& instance, const DagWeights& weights,
                   const DistanceMap& dist, const ArrivalTrace& trace);

// Adaptive adversaries see the public state after each arrival and produce
// the next type id, or nothing to stop.
using AdversaryFn = std::function<std::optional<std::string>(const OnlineState&)>;

struct AdaptiveRun {
    ArrivalTrace trace;
    SimResult result;
};

AdaptiveRun run_with_adversary(Policy policy, const DagInstance& instance,
                               const DagWeights& weights, const DistanceMap& dist,
                               AdversaryFn adversary);

// True when `type_id` still has a path of positive residuals to the sink.
bool has_residual_path(const DagInstance& instance, const std::map<std::string, double>& residual,
                       const std::string& type_id);

// ---- adaptive bipartite algorithm (d = 1) ----

struct AdaptiveOptions {
    double eta_bound = 1e6;  // NonTermination guard: decrements <= 2 n log_{1+eps}(eta_bound)
};

struct AdaptiveResult {
    double value = 0;
    OnlineState state;
    long long decrement_count = 0;
    std::map<std::string, double> alloc;             // real allocation per advertiser
    std::map<std::string, double> final_log_weights; // imaginary weights at the end
};

// Event-driven water-filling with an imaginary instance: real and imaginary
// allocations grow together until an imaginary allocation hits (1+eps)^2 C;
// offending weights drop by (1+eps) and the imaginary instance is recomputed
// under the new weights. Real allocations are never revised.
AdaptiveResult simulate_adaptive_bipartite(const DagInstance& instance,
                                           const std::map<std::string, double>& predicted_log,
                                           double eps, const ArrivalTrace& trace,
                                           const AdaptiveOptions& options = {});

// ---- prediction error ----

struct ParameterError {
    double eta = 1;  // >= 1
};

// Both maps are normalized so their minimum weight is 1 before the max
// ratio is taken. Scale-invariant in either argument.
ParameterError parameter_error(const std::map<std::string, double>& predicted_log,
                               const std::map<std::string, double>& reference_log);

// ---- adversarial generators ----

struct LowerBoundInstance {
    DagInstance instance;
    ArrivalTrace trace;
    DagWeights planted_weights;
    double planted_eta = 1;
    double p = 0;  // (n - s) / n
};

// The permuted bipartite construction: first s arrivals see every
// advertiser, the rest see only the n-s advertisers the permutation picked.
// All capacities 1; planted weights put p/eps on the first s advertisers.
LowerBoundInstance gen_bipartite_lowerbound(int n, int s, double eps, std::uint64_t seed);

struct WorstCaseDag {
    DagInstance instance;  // two complete binary trees, all capacities 1
    int d = 1;
    std::string initial_type;  // adjacent to both roots
};

WorstCaseDag gen_worstcase_dag(int d);

// Adversary for the worst-case DAG: emits the initial impression, reads the
// chosen path off the residuals, then pins one impression per path vertex.
AdversaryFn worstcase_adversary(const WorstCaseDag& wc);

}  // namespace propflow

#endif
