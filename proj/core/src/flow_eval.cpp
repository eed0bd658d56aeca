#include "propflow/flow_eval.hpp"

#include <algorithm>
#include <cmath>

#include "propflow/errors.hpp"

namespace propflow {

std::vector<double> proportional_fractions(const std::vector<double>& log_weights) {
    std::vector<double> x(log_weights.size(), 0.0);
    if (log_weights.empty()) return x;
    double top = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        x[i] = std::exp(log_weights[i] - top);
        total += x[i];
    }
    for (double& v : x) v /= total;
    return x;
}

std::vector<double> layered_forward_alloc(const LayeredGraph& g,
                                          const std::vector<double>& log_weights,
                                          const std::vector<double>& type_counts) {
    std::vector<double> alloc(g.nodes.size(), 0.0);
    for (std::size_t i = 0; i < g.types.size(); ++i) {
        const auto& nb = g.types[i].neighbors;
        if (nb.empty()) continue;  // unroutable impressions contribute nothing
        std::vector<double> lw(nb.size());
        for (std::size_t j = 0; j < nb.size(); ++j) lw[j] = log_weights[nb[j]];
        auto x = proportional_fractions(lw);
        for (std::size_t j = 0; j < nb.size(); ++j) alloc[nb[j]] += type_counts[i] * x[j];
    }
    for (int layer = 1; layer < g.d; ++layer) {
        for (std::size_t u : g.layer_members[layer - 1]) {
            if (g.out[u].empty()) continue;
            double forward = std::min(alloc[u], g.capacity_double(u));
            std::vector<double> lw(g.out[u].size());
            for (std::size_t j = 0; j < g.out[u].size(); ++j) lw[j] = log_weights[g.out[u][j]];
            auto x = proportional_fractions(lw);
            for (std::size_t j = 0; j < g.out[u].size(); ++j) alloc[g.out[u][j]] += forward * x[j];
        }
    }
    return alloc;
}

double layered_value(const LayeredGraph& g, const std::vector<double>& alloc) {
    double value = 0.0;
    if (g.d == 0) return 0.0;
    for (std::size_t v : g.layer_members[g.d - 1]) {
        value += std::min(alloc[v], g.capacity_double(v));
    }
    return value;
}

FlowReport route_layered(const LayeredGraph& g, const WeightState& weights,
                         const std::vector<double>& type_counts) {
    if (type_counts.size() != g.types.size()) {
        throw Error(ErrorKind::InvalidArgument, "count vector does not match the type list");
    }
    auto lw = layered_log_weights(g, weights);
    auto alloc = layered_forward_alloc(g, lw, type_counts);
    FlowReport report;
    report.mode = FlowReport::Mode::Layered;
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        report.alloc[g.node_name(v)] = alloc[v];
        report.truncated[g.node_name(v)] = std::min(alloc[v], g.capacity_double(v));
    }
    report.value = layered_value(g, alloc);
    return report;
}

FlowReport route_layered(const LayeredGraph& g, const WeightState& weights) {
    std::vector<double> counts(g.types.size());
    for (std::size_t i = 0; i < g.types.size(); ++i) counts[i] = g.types[i].count;
    return route_layered(g, weights, counts);
}

namespace {

// Log weight of v's copy in the layer right after u. With the run's
// schedule attached this reproduces the layered copy weights exactly;
// otherwise it falls back to the idealized 1/(2n)^gap exponent.
double gap_adjusted_log(const DagWeights& w, double node_log, int node_layer, int gap) {
    if (node_log == 0.0 || gap == 0) return node_log;
    if (!w.layer_epsilons.empty() && node_layer >= 1 &&
        node_layer <= static_cast<int>(w.layer_epsilons.size())) {
        double target = std::log1p(w.layer_epsilons[node_layer - gap - 1]);
        double own = std::log1p(w.layer_epsilons[node_layer - 1]);
        return node_log * (target / own);
    }
    if (w.rho_base <= 0) {
        throw Error(ErrorKind::InvalidArgument, "DagWeights carries no exponent base");
    }
    double scale = std::pow(w.rho_base, static_cast<double>(gap));
    if (!std::isfinite(scale)) {
        throw Error(ErrorKind::ExponentOverflow,
                    "(2n)^" + std::to_string(gap) + " is not representable");
    }
    return node_log / scale;
}

}  // namespace

FlowReport route_dag(const DagInstance& instance, const DagWeights& weights,
                     const DistanceMap& dist, const std::vector<double>& type_counts) {
    if (type_counts.size() != instance.impression_types.size()) {
        throw Error(ErrorKind::InvalidArgument, "count vector does not match the type list");
    }
    CompiledDag g = compile(instance);
    const std::size_t n = g.node_ids.size();
    std::vector<double> alloc(n + 1, 0.0);

    std::vector<int> layer(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        layer[v] = dist.reached(g.node_ids[v]) ? dist.at(g.node_ids[v]) - 1 : DistanceMap::kUnreached;
    }

    auto distribute = [&](const std::vector<std::size_t>& targets, int source_layer, double amount) {
        if (targets.empty() || amount <= 0.0) return;
        std::vector<double> lw(targets.size());
        for (std::size_t j = 0; j < targets.size(); ++j) {
            std::size_t v = targets[j];
            if (v == g.sink_index) {
                lw[j] = 0.0;
            } else {
                int gap = layer[v] - source_layer - 1;
                lw[j] = gap_adjusted_log(weights, weights.log_of(g.node_ids[v]), layer[v], gap);
            }
        }
        auto x = proportional_fractions(lw);
        for (std::size_t j = 0; j < targets.size(); ++j) alloc[targets[j]] += amount * x[j];
    };

    for (std::size_t i = 0; i < instance.impression_types.size(); ++i) {
        distribute(g.type_neighbors[i], 0, type_counts[i]);
    }
    for (std::size_t u : g.topo_order) {
        if (layer[u] == DistanceMap::kUnreached) continue;
        double forward = std::min(alloc[u], g.capacity[u]);
        distribute(g.out[u], layer[u], forward);
    }

    FlowReport report;
    report.mode = FlowReport::Mode::DirectDag;
    for (std::size_t v = 0; v < n; ++v) {
        report.alloc[g.node_ids[v]] = alloc[v];
        report.truncated[g.node_ids[v]] = std::min(alloc[v], g.capacity[v]);
    }
    report.value = alloc[g.sink_index];
    return report;
}

FlowReport route_dag(const DagInstance& instance, const DagWeights& weights,
                     const DistanceMap& dist) {
    std::vector<double> counts(instance.impression_types.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        counts[i] = instance.impression_types[i].count.to_double();
    }
    return route_dag(instance, weights, dist, counts);
}

}  // namespace propflow
