#ifndef PROPFLOW_FLOW_EVAL_HPP
#define PROPFLOW_FLOW_EVAL_HPP

#include <map>
#include <string>
#include <vector>

#include "propflow/distances.hpp"
#include "propflow/instance.hpp"
#include "propflow/layered.hpp"
#include "propflow/weights.hpp"

namespace propflow {

struct FlowReport {
    enum class Mode { Layered, DirectDag };

    std::map<std::string, double> alloc;      // per node
    std::map<std::string, double> truncated;  // min(alloc, capacity)
    double value = 0;                         // R(alpha, I)
    Mode mode = Mode::Layered;
};

// Proportional fractions over a neighborhood, computed in log space with
// max-subtraction so weight ratios spanning hundreds of orders of magnitude
// stay finite.
std::vector<double> proportional_fractions(const std::vector<double>& log_weights);

// Forward pass: impressions split their counts over layer-1 neighbors, each
// layer passes min(Alloc, C) forward proportionally. Returns per-node Alloc.
std::vector<double> layered_forward_alloc(const LayeredGraph& g,
                                          const std::vector<double>& log_weights,
                                          const std::vector<double>& type_counts);

double layered_value(const LayeredGraph& g, const std::vector<double>& alloc);

FlowReport route_layered(const LayeredGraph& g, const WeightState& weights,
                         const std::vector<double>& type_counts);
FlowReport route_layered(const LayeredGraph& g, const WeightState& weights);

// Direct-DAG mode: nodes in topological order, fractions from the transferred
// weights with the per-gap exponent of the layered run, aggregation with
// min(Alloc, C). Agrees with route_layered on the instance's reduction.
FlowReport route_dag(const DagInstance& instance, const DagWeights& weights,
                     const DistanceMap& dist);
FlowReport route_dag(const DagInstance& instance, const DagWeights& weights,
                     const DistanceMap& dist, const std::vector<double>& type_counts);

}  // namespace propflow

#endif
