#ifndef PROPFLOW_LEARNING_HPP
#define PROPFLOW_LEARNING_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "propflow/instance.hpp"
#include "propflow/online.hpp"
#include "propflow/weights.hpp"

namespace propflow {

struct InstanceVector {
    std::map<std::string, Rational> counts;  // type id -> m_i

    double l1_norm() const;
};

// gamma = sum_i |a_i - b_i|; types missing on one side count as zero
double instance_distance(const InstanceVector& a, const InstanceVector& b);

struct TypeSupport {
    std::string type_id;
    double probability = 0;
};

// Distribution over impression types for a fixed offline graph. `iid` draws
// every slot from one support; `product` gives each of the m slots its own.
struct TypeDistribution {
    enum class Kind { Iid, Product };

    Kind kind = Kind::Iid;
    int m = 0;                                       // impressions per instance
    std::vector<TypeSupport> support;                // iid
    std::vector<std::vector<TypeSupport>> per_slot;  // product, size m

    void check(const DagInstance& skeleton) const;   // probabilities and type ids
};

void save_distribution(const TypeDistribution& dist, std::ostream& out);
TypeDistribution load_distribution(std::istream& in);

struct SampledInstance {
    InstanceVector counts;
    ArrivalTrace trace;
};

SampledInstance sample_instance(const TypeDistribution& dist, std::uint64_t seed);

// Per-type rounded mean over the samples, ties rounding up. With
// `round_counts` off the exact rational mean is kept (diagnostic runs).
InstanceVector averaged_instance(const std::vector<InstanceVector>& samples,
                                 bool round_counts = true);

struct LearnedWeights {
    DagWeights weights;
    InstanceVector averaged;
    double value_on_averaged = 0;  // R(w, averaged instance)
};

// The averaged-instance learner: builds the averaged instance and runs the
// full reduce -> layered weights -> transfer pipeline on it.
LearnedWeights learn_weights(const std::vector<InstanceVector>& samples,
                             const DagInstance& skeleton, double eps,
                             long long max_iterations = 0);

struct MonteCarloEstimate {
    double mean = 0;
    double std_error = 0;
    int trials = 0;
};

// Mean and standard error of R(weights, I) over sampled instances.
MonteCarloEstimate estimate_expected_value(const DagWeights& weights,
                                           const DagInstance& skeleton,
                                           const TypeDistribution& dist, int trials,
                                           std::uint64_t seed);

struct RobustnessRow {
    double gamma = 0;
    double value_direct = 0;
    double value_maximal = 0;
    double opt = 0;
    double bound = 0;  // max((1-eps) OPT - 2 gamma, OPT / (d+1))
    bool ok = false;
};

struct RobustnessReport {
    std::vector<RobustnessRow> rows;
    double base_ratio = 0;  // R(w, base) / OPT(base), the verified (1-eps)
    int violations = 0;
};

// Evaluates base-instance weights on each perturbed instance and checks the
// instance-robustness bound per row. The weights are first verified to be a
// (1-eps)-approximation on the base instance.
RobustnessReport robustness_sweep(const DagInstance& base,
                                  const std::vector<InstanceVector>& perturbations,
                                  double eps, long long max_iterations = 0);

}  // namespace propflow

#endif
