#include "propflow/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "propflow/errors.hpp"
#include "propflow/csv.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/log.hpp"

namespace propflow {

namespace {

constexpr double kThresholdSlack = 1e-12;  // over-allocation compares strictly, plus this

bool over_threshold(double alloc, double threshold) {
    return alloc > threshold + kThresholdSlack;
}

}  // namespace

long long default_layered_iterations(std::size_t n, const EpsilonSchedule& schedule) {
    double nn = static_cast<double>(std::max<std::size_t>(n, 1));
    double log_term = std::max(1.0, std::log(nn / schedule.eps_max));
    double t = std::ceil(nn * log_term / (schedule.eps_max * schedule.eps_min));
    return static_cast<long long>(std::max(1.0, t));
}

long long default_bipartite_iterations(std::size_t n, double eps) {
    double nn = static_cast<double>(std::max<std::size_t>(n, 1));
    double t = std::ceil((2.0 / (eps * eps)) * std::max(1.0, std::log(nn / eps)));
    return static_cast<long long>(std::max(1.0, t));
}

double level_gap_threshold(std::size_t n, const EpsilonSchedule& schedule) {
    double nn = static_cast<double>(std::max<std::size_t>(n, 1));
    return std::log(nn / schedule.eps_max) / schedule.eps_min;
}

bool cond(const LayeredGraph& g, std::size_t a, const std::vector<int>& decrements,
          const std::vector<bool>& decreased_this_iteration, double gap_threshold) {
    const auto& next = g.out[a];
    if (next.empty()) return false;
    // same layer, same epsilon: the max-weight set is the min-decrement set
    int min_k = decrements[next[0]];
    for (std::size_t w : next) min_k = std::min(min_k, decrements[w]);
    for (std::size_t w : next) {
        if (decrements[w] != min_k) continue;
        if (!decreased_this_iteration[w]) return false;
        // Lev(w) - Lev(a) = k_a - k_w; a neighbor that never decreased has
        // Lev = T and fails the first check already
        double gap = static_cast<double>(decrements[a]) - static_cast<double>(decrements[w]);
        if (gap >= gap_threshold) return false;
    }
    return true;
}

std::vector<double> layered_log_weights(const LayeredGraph& g, const WeightState& state) {
    std::vector<double> lw(g.nodes.size(), 0.0);
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        lw[v] = -static_cast<double>(state.decrements[v]) * std::log1p(state.schedule.at(g.nodes[v].layer));
    }
    return lw;
}

WeightState d_layer_weights(const LayeredGraph& g, const EpsilonSchedule& schedule,
                            const WeightRunOptions& options) {
    if (schedule.depth() != g.d) {
        throw Error(ErrorKind::InvalidArgument, "schedule depth does not match the layer count");
    }
    WeightState state;
    state.schedule = schedule;
    state.decrements.assign(g.nodes.size(), 0);

    long long T = options.max_iterations > 0
                      ? options.max_iterations
                      : default_layered_iterations(g.max_layer_size, schedule);
    T = std::min(T, options.hard_cap);
    state.max_iterations = T;
    if (g.d == 0) return state;

    // self-decrease thresholds: prod_{j'<=j}(1+eps_j') * C
    std::vector<double> layer_factor(g.d + 1, 1.0);
    for (int j = 1; j <= g.d; ++j) layer_factor[j] = layer_factor[j - 1] * (1.0 + schedule.at(j));
    std::vector<double> threshold(g.nodes.size());
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        threshold[v] = g.nodes[v].unbounded
                           ? std::numeric_limits<double>::infinity()
                           : layer_factor[g.nodes[v].layer] * g.nodes[v].capacity.to_double();
    }

    const double gap_threshold = level_gap_threshold(g.max_layer_size, schedule);
    std::vector<double> counts(g.types.size());
    for (std::size_t i = 0; i < g.types.size(); ++i) counts[i] = g.types[i].count;

    auto alloc_now = [&]() {
        return layered_forward_alloc(g, layered_log_weights(g, state), counts);
    };

    std::vector<double> alloc_prev;
    std::vector<bool> decreased_prev;
    std::vector<bool> decreased(g.nodes.size(), false);

    for (long long t = 1; t <= T; ++t) {
        std::vector<double> alloc = alloc_now();  // Alloc at the end of iteration t-1
        if (options.observer && t > 1) {
            IterationRecord rec;
            rec.iteration = t - 1;
            rec.alloc_before = &alloc_prev;
            rec.alloc_after = &alloc;
            rec.decreased = &decreased_prev;
            rec.decrements = &state.decrements;
            options.observer(rec);
        }

        std::fill(decreased.begin(), decreased.end(), false);
        bool any = false;
        for (int j = g.d; j >= 1; --j) {
            for (std::size_t v : g.layer_members[j - 1]) {
                if (over_threshold(alloc[v], threshold[v])) {
                    state.decrements[v]++;  // self-decrease
                    decreased[v] = any = true;
                } else if (j < g.d && cond(g, v, state.decrements, decreased, gap_threshold)) {
                    state.decrements[v]++;  // forced-decrease
                    decreased[v] = any = true;
                }
            }
        }
        state.iterations_run = t;

        if (!any && options.early_exit) {
            state.fixed_point = true;
            if (options.observer) {
                // no decrement means the weights, and so Alloc, are unchanged
                IterationRecord rec;
                rec.iteration = t;
                rec.alloc_before = &alloc;
                rec.alloc_after = &alloc;
                rec.decreased = &decreased;
                rec.decrements = &state.decrements;
                options.observer(rec);
            }
            return state;
        }
        alloc_prev = std::move(alloc);
        decreased_prev = decreased;
    }

    if (options.observer && state.iterations_run > 0) {
        std::vector<double> alloc = alloc_now();
        IterationRecord rec;
        rec.iteration = state.iterations_run;
        rec.alloc_before = &alloc_prev;
        rec.alloc_after = &alloc;
        rec.decreased = &decreased_prev;
        rec.decrements = &state.decrements;
        options.observer(rec);
    }
    return state;
}

WeightState three_layer_weights(const LayeredGraph& g, const EpsilonSchedule& schedule,
                                const WeightRunOptions& options) {
    if (g.d != 2) {
        throw Error(ErrorKind::InvalidArgument,
                    "three_layer_weights needs exactly two offline layers (I, A, B)");
    }
    return d_layer_weights(g, schedule, options);
}

BipartiteView bipartite_view(const DagInstance& instance) {
    CompiledDag g = compile(instance);
    for (std::size_t v = 0; v < g.node_ids.size(); ++v) {
        for (std::size_t w : g.out[v]) {
            if (w != g.sink_index) {
                throw Error(ErrorKind::InvalidArgument,
                            "not bipartite: edge " + g.node_ids[v] + " -> " + g.node_ids[w]);
            }
        }
    }
    BipartiteView view;
    view.ids = g.node_ids;
    view.capacity = g.capacity;
    view.type_neighbors = g.type_neighbors;
    view.type_count = g.type_count;
    return view;
}

WeightState bipartite_weights(const BipartiteView& view, double eps,
                              const BipartiteOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "epsilon must be in (0,1)");
    }
    const double base = options.weight_base > 0 ? options.weight_base : 1.0 + eps;
    const double factor = options.threshold_factor > 0 ? options.threshold_factor : 1.0 + eps;
    const double log_base = std::log(base);

    WeightState state;
    state.schedule = flat_schedule(eps);
    state.decrements.assign(view.capacity.size(), 0);
    long long T = options.max_iterations > 0
                      ? options.max_iterations
                      : default_bipartite_iterations(view.capacity.size(), eps);
    T = std::min(T, options.hard_cap);
    state.max_iterations = T;

    std::vector<double> alloc(view.capacity.size());
    std::vector<double> lw(view.capacity.size());
    for (long long t = 1; t <= T; ++t) {
        for (std::size_t a = 0; a < lw.size(); ++a) lw[a] = -state.decrements[a] * log_base;
        std::fill(alloc.begin(), alloc.end(), 0.0);
        for (std::size_t i = 0; i < view.type_neighbors.size(); ++i) {
            const auto& nb = view.type_neighbors[i];
            if (nb.empty()) continue;
            std::vector<double> nlw(nb.size());
            for (std::size_t j = 0; j < nb.size(); ++j) nlw[j] = lw[nb[j]];
            auto x = proportional_fractions(nlw);
            for (std::size_t j = 0; j < nb.size(); ++j) alloc[nb[j]] += view.type_count[i] * x[j];
        }

        bool any = false;
        for (std::size_t a = 0; a < alloc.size(); ++a) {
            double limit = factor * view.capacity[a];
            bool trigger = options.strict_compare ? over_threshold(alloc[a], limit)
                                                  : alloc[a] >= limit - kThresholdSlack;
            if (trigger) {
                state.decrements[a]++;
                any = true;
            }
        }
        state.iterations_run = t;
        if (!any && options.early_exit) {
            state.fixed_point = true;
            break;
        }
    }
    return state;
}

DagWeights transfer_to_dag(const WeightState& state, const LayeredGraph& g,
                           const DistanceMap& dist) {
    (void)dist;
    DagWeights out;
    out.rho_base = 2.0 * static_cast<double>(g.max_layer_size);
    out.layer_epsilons = state.schedule.per_layer;

    for (const auto& [origin, chain] : g.copy_chains) {
        int k = state.decrements[chain.front()];
        for (std::size_t v : chain) {
            if (state.decrements[v] != k) {
                throw Error(ErrorKind::DependenceViolated,
                            "copy chain of '" + origin + "' has unequal decrement counts");
            }
        }
        std::size_t real = chain.back();
        if (!g.nodes[real].is_real) {
            throw Error(ErrorKind::DependenceViolated,
                        "chain of '" + origin + "' does not end in its real copy");
        }
        out.weight_log[origin] =
            -static_cast<double>(k) * std::log1p(state.schedule.at(g.nodes[real].layer));

        if (k > 0) {
            for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
                int lo = g.nodes[chain[i]].layer, hi = g.nodes[chain[i + 1]].layer;
                double ratio = std::log1p(state.schedule.at(lo)) / std::log1p(state.schedule.at(hi));
                out.max_chain_drift = std::max(out.max_chain_drift,
                                               std::abs(ratio * out.rho_base - 1.0));
            }
        }
    }
    // sink copies never decrement
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        if (g.nodes[v].origin == g.sink_id && state.decrements[v] != 0) {
            throw Error(ErrorKind::DependenceViolated, "sink copy with a decremented weight");
        }
    }
    out.weight_log[g.sink_id] = 0.0;
    if (out.max_chain_drift > 0) {
        diag("virtual-weight drift " + format_number(out.max_chain_drift));
    }
    return out;
}

// ---- files ----

void save_weight_state(const WeightState& state, const LayeredGraph& g, std::ostream& out) {
    out << "propflow-weights v1\n";
    out << "T " << state.max_iterations << "\n";
    out << "iterations " << state.iterations_run << "\n";
    out << "fixed_point " << (state.fixed_point ? 1 : 0) << "\n";
    out << "schedule " << format_exact(state.schedule.top_epsilon) << "\n";
    out << "epsilons";
    for (double e : state.schedule.per_layer) out << " " << format_exact(e);
    out << "\n";
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        out << "node " << g.node_name(v) << " " << state.decrements[v] << " "
            << format_exact(state.schedule.at(g.nodes[v].layer)) << "\n";
    }
}

WeightState load_weight_state(const LayeredGraph& g, std::istream& in) {
    WeightState state;
    state.decrements.assign(g.nodes.size(), 0);
    std::map<std::string, std::size_t> by_name;
    for (std::size_t v = 0; v < g.nodes.size(); ++v) by_name[g.node_name(v)] = v;

    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (!header) {
            if (key != "propflow-weights") {
                throw Error(ErrorKind::ParseError, "line 1: not a weight-state file");
            }
            header = true;
            continue;
        }
        if (key == "T") {
            ss >> state.max_iterations;
        } else if (key == "iterations") {
            ss >> state.iterations_run;
        } else if (key == "fixed_point") {
            int f = 0;
            ss >> f;
            state.fixed_point = f != 0;
        } else if (key == "schedule") {
            ss >> state.schedule.top_epsilon;
        } else if (key == "epsilons") {
            state.schedule.per_layer.clear();
            double e;
            while (ss >> e) state.schedule.per_layer.push_back(e);
            if (!state.schedule.per_layer.empty()) {
                state.schedule.eps_min = state.schedule.per_layer.front();
                state.schedule.eps_max = state.schedule.per_layer.back();
            }
        } else if (key == "node") {
            std::string name;
            int k;
            ss >> name >> k;
            auto it = by_name.find(name);
            if (it == by_name.end()) {
                throw Error(ErrorKind::ParseError,
                            "line " + std::to_string(line_no) + ": unknown layered node '" + name + "'");
            }
            state.decrements[it->second] = k;
        } else {
            throw Error(ErrorKind::ParseError,
                        "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return state;
}

void save_dag_weights(const DagWeights& w, std::ostream& out) {
    out << "propflow-dag-weights v1\n";
    out << "rho_base " << format_exact(w.rho_base) << "\n";
    if (!w.layer_epsilons.empty()) {
        out << "epsilons";
        for (double e : w.layer_epsilons) out << " " << format_exact(e);
        out << "\n";
    }
    out << "drift " << format_exact(w.max_chain_drift) << "\n";
    for (const auto& [id, lg] : w.weight_log) {
        out << "node " << id << " " << format_exact(lg) << "\n";
    }
}

DagWeights load_dag_weights(std::istream& in) {
    DagWeights w;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (!header) {
            if (key != "propflow-dag-weights") {
                throw Error(ErrorKind::ParseError, "line 1: not a dag-weights file");
            }
            header = true;
            continue;
        }
        if (key == "rho_base") {
            ss >> w.rho_base;
        } else if (key == "epsilons") {
            double e;
            while (ss >> e) w.layer_epsilons.push_back(e);
        } else if (key == "drift") {
            ss >> w.max_chain_drift;
        } else if (key == "node") {
            std::string id;
            double lg;
            ss >> id >> lg;
            w.weight_log[id] = lg;
        } else {
            throw Error(ErrorKind::ParseError,
                        "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return w;
}

}  // namespace propflow
