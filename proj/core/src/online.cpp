#include "propflow/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "propflow/errors.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/rng.hpp"

namespace propflow {

void save_trace(const ArrivalTrace& trace, std::ostream& out) {
    for (const auto& id : trace.arrivals) out << id << "\n";
}

ArrivalTrace load_trace(std::istream& in) {
    ArrivalTrace t;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string id;
        if (ss >> id) t.arrivals.push_back(id);
    }
    return t;
}

DagInstance realized_instance(const DagInstance& instance, const ArrivalTrace& trace) {
    std::map<std::string, Rational> counts;
    for (const auto& id : trace.arrivals) {
        if (!instance.find_type(id)) {
            throw Error(ErrorKind::UnknownNodeReference, "trace references type '" + id + "'");
        }
        auto [it, fresh] = counts.emplace(id, Rational(1));
        if (!fresh) it->second = it->second + Rational(1);
    }
    return with_counts(instance, counts);
}

const char* policy_name(Policy p) {
    switch (p) {
        case Policy::Direct: return "direct";
        case Policy::Maximal: return "maximal";
        case Policy::Greedy: return "greedy";
    }
    return "?";
}

std::optional<Policy> parse_policy(const std::string& name) {
    if (name == "direct") return Policy::Direct;
    if (name == "maximal") return Policy::Maximal;
    if (name == "greedy") return Policy::Greedy;
    return std::nullopt;
}

namespace {

constexpr double kResidualTol = 1e-12;

// Shared per-run machinery: compiled graph, per-edge log weights adjusted
// for layer gaps, residual tracking and the blocked closure.
struct OnlineCore {
    const DagInstance& instance;
    CompiledDag g;
    std::vector<int> layer;          // offline nodes; kUnreached if no impression reaches
    std::vector<double> residual;
    std::vector<bool> blocked;
    std::vector<double> node_log;    // weight_log per offline node
    const DagWeights* weights;
    std::map<std::string, std::size_t> type_index;

    OnlineCore(const DagInstance& inst, const DagWeights* w, const DistanceMap* dist)
        : instance(inst), g(compile(inst)), weights(w) {
        const std::size_t n = g.node_ids.size();
        layer.assign(n, DistanceMap::kUnreached);
        if (dist) {
            for (std::size_t v = 0; v < n; ++v) {
                if (dist->reached(g.node_ids[v])) layer[v] = dist->at(g.node_ids[v]) - 1;
            }
        }
        residual.assign(n, 0.0);
        for (std::size_t v = 0; v < n; ++v) residual[v] = g.capacity[v];
        node_log.assign(n, 0.0);
        if (w) {
            for (std::size_t v = 0; v < n; ++v) node_log[v] = w->log_of(g.node_ids[v]);
        }
        blocked.assign(n, false);
        for (std::size_t i = 0; i < instance.impression_types.size(); ++i) {
            type_index[instance.impression_types[i].id] = i;
        }
        refresh_blocked();
    }

    double adjusted_log(std::size_t v, int source_layer) const {
        if (v == g.sink_index) return 0.0;
        if (node_log[v] == 0.0) return 0.0;
        int gap = layer[v] - source_layer - 1;
        if (!weights->layer_epsilons.empty() && layer[v] >= 1 &&
            layer[v] <= static_cast<int>(weights->layer_epsilons.size())) {
            double target = std::log1p(weights->layer_epsilons[layer[v] - gap - 1]);
            double own = std::log1p(weights->layer_epsilons[layer[v] - 1]);
            return node_log[v] * (target / own);
        }
        double scale = std::pow(weights->rho_base > 0 ? weights->rho_base : 1.0,
                                static_cast<double>(gap));
        if (!std::isfinite(scale)) {
            throw Error(ErrorKind::ExponentOverflow, "gap exponent overflow");
        }
        return node_log[v] / scale;
    }

    void refresh_blocked() {
        // reverse topological pass: full capacity or all successors blocked
        for (auto it = g.topo_order.rbegin(); it != g.topo_order.rend(); ++it) {
            std::size_t v = *it;
            if (residual[v] <= kResidualTol) {
                blocked[v] = true;
                continue;
            }
            bool open = false;
            for (std::size_t w : g.out[v]) {
                if (w == g.sink_index || !blocked[w]) { open = true; break; }
            }
            blocked[v] = !open;
        }
    }

    std::size_t type_of(const std::string& id) const {
        auto it = type_index.find(id);
        if (it == type_index.end()) {
            throw Error(ErrorKind::UnknownNodeReference, "unknown type '" + id + "'");
        }
        return it->second;
    }

    OnlineState snapshot(double value, const std::vector<double>& gamma) const {
        OnlineState s;
        for (std::size_t v = 0; v < g.node_ids.size(); ++v) {
            s.residual[g.node_ids[v]] = residual[v];
            if (blocked[v]) s.blocked.insert(g.node_ids[v]);
        }
        s.value = value;
        s.gamma = gamma;
        return s;
    }
};

// One unblocked proportional round for simulate_maximal: pattern of a unit
// injected at `type`, restricted to unblocked nodes. Empty when the type is
// cut off. All pattern mass reaches the sink.
std::vector<double> unblocked_pattern(const OnlineCore& core, std::size_t type) {
    const auto& g = core.g;
    std::vector<double> pattern(g.node_ids.size(), 0.0);
    std::vector<std::size_t> targets;
    std::vector<double> lw;
    targets.clear();
    for (std::size_t v : g.type_neighbors[type]) {
        if (!core.blocked[v]) targets.push_back(v);
    }
    if (targets.empty()) return {};
    lw.resize(targets.size());
    for (std::size_t j = 0; j < targets.size(); ++j) lw[j] = core.adjusted_log(targets[j], 0);
    auto x = proportional_fractions(lw);
    for (std::size_t j = 0; j < targets.size(); ++j) pattern[targets[j]] += x[j];

    for (std::size_t u : g.topo_order) {
        if (pattern[u] <= 0.0) continue;
        targets.clear();
        bool to_sink = false;
        for (std::size_t w : g.out[u]) {
            if (w == g.sink_index) { targets.push_back(w); to_sink = true; }
            else if (!core.blocked[w]) targets.push_back(w);
        }
        (void)to_sink;
        if (targets.empty()) continue;  // cannot happen for unblocked u
        lw.resize(targets.size());
        for (std::size_t j = 0; j < targets.size(); ++j) lw[j] = core.adjusted_log(targets[j], core.layer[u]);
        auto x = proportional_fractions(lw);
        for (std::size_t j = 0; j < targets.size(); ++j) {
            if (targets[j] != g.sink_index) pattern[targets[j]] += pattern[u] * x[j];
        }
    }
    return pattern;
}

class MaximalSim {
public:
    MaximalSim(const DagInstance& inst, const DagWeights& w, const DistanceMap& dist)
        : core_(inst, &w, &dist) {}

    double arrive(const std::string& type_id) {
        std::size_t type = core_.type_of(type_id);
        double gamma = 0.0;
        for (std::size_t round = 0; round <= core_.g.node_ids.size() + 1; ++round) {
            if (gamma >= 1.0 - kResidualTol) break;
            auto pattern = unblocked_pattern(core_, type);
            if (pattern.empty()) break;  // no residual path to the sink
            double want = 1.0 - gamma;
            double lambda = 1.0;
            for (std::size_t v = 0; v < pattern.size(); ++v) {
                if (pattern[v] * want > kResidualTol) {
                    lambda = std::min(lambda, core_.residual[v] / (pattern[v] * want));
                }
            }
            double sent = lambda * want;
            for (std::size_t v = 0; v < pattern.size(); ++v) {
                if (pattern[v] <= 0.0) continue;
                core_.residual[v] -= sent * pattern[v];
                if (core_.residual[v] < kResidualTol) core_.residual[v] = 0.0;
            }
            core_.refresh_blocked();
            gamma += sent;
            value_ += sent;
        }
        gammas_.push_back(std::min(gamma, 1.0));
        return gammas_.back();
    }

    OnlineState state() const { return core_.snapshot(value_, gammas_); }
    double value() const { return value_; }

private:
    OnlineCore core_;
    double value_ = 0;
    std::vector<double> gammas_;
};

class DirectSim {
public:
    DirectSim(const DagInstance& inst, const DagWeights& w, const DistanceMap& dist)
        : instance_(inst), weights_(w), dist_(dist), core_(inst, &w, &dist),
          counts_(inst.impression_types.size(), 0.0) {}

    double arrive(const std::string& type_id) {
        counts_[core_.type_of(type_id)] += 1.0;
        FlowReport report = route_dag(instance_, weights_, dist_, counts_);
        double gamma = report.value - value_;
        value_ = report.value;
        gammas_.push_back(gamma);
        last_report_ = std::move(report);
        return gamma;
    }

    OnlineState state() {
        // feasible throughput of the truncated recurrence defines residuals
        for (std::size_t v = 0; v < core_.g.node_ids.size(); ++v) {
            double used = 0.0;
            if (!last_report_.truncated.empty()) {
                used = last_report_.truncated.at(core_.g.node_ids[v]);
            }
            core_.residual[v] = std::max(core_.g.capacity[v] - used, 0.0);
            if (core_.residual[v] < kResidualTol) core_.residual[v] = 0.0;
        }
        core_.refresh_blocked();
        return core_.snapshot(value_, gammas_);
    }

    double value() const { return value_; }

private:
    const DagInstance& instance_;
    const DagWeights& weights_;
    const DistanceMap& dist_;
    OnlineCore core_;
    std::vector<double> counts_;
    FlowReport last_report_;
    double value_ = 0;
    std::vector<double> gammas_;
};

class GreedySim {
public:
    explicit GreedySim(const DagInstance& inst) : core_(inst, nullptr, nullptr) {
        // lowest node id wins ties: sort adjacency by id
        for (auto& nb : core_.g.out) sort_by_id(nb);
        for (auto& nb : core_.g.type_neighbors) sort_by_id(nb);
    }

    double arrive(const std::string& type_id) {
        std::size_t type = core_.type_of(type_id);
        std::vector<std::size_t> path;
        double gamma = 0.0;
        for (std::size_t v : core_.g.type_neighbors[type]) {
            if (find_path(v, path)) break;
        }
        if (!path.empty()) {
            for (std::size_t v : path) {
                core_.residual[v] -= 1.0;
                if (core_.residual[v] < kResidualTol) core_.residual[v] = 0.0;
            }
            gamma = 1.0;
            value_ += 1.0;
        }
        core_.refresh_blocked();
        gammas_.push_back(gamma);
        return gamma;
    }

    OnlineState state() const { return core_.snapshot(value_, gammas_); }
    double value() const { return value_; }

private:
    void sort_by_id(std::vector<std::size_t>& nb) {
        std::sort(nb.begin(), nb.end(), [&](std::size_t a, std::size_t b) {
            if (a == core_.g.sink_index) return false;
            if (b == core_.g.sink_index) return true;
            return core_.g.node_ids[a] < core_.g.node_ids[b];
        });
    }

    bool find_path(std::size_t v, std::vector<std::size_t>& path) {
        if (core_.residual[v] < 1.0 - kResidualTol) return false;
        path.push_back(v);
        for (std::size_t w : core_.g.out[v]) {
            if (w == core_.g.sink_index) return true;
            if (find_path(w, path)) return true;
        }
        path.pop_back();
        return false;
    }

    OnlineCore core_;
    double value_ = 0;
    std::vector<double> gammas_;
};

}  // namespace

SimResult simulate_direct(const DagInstance& instance, const DagWeights& weights,
                          const DistanceMap& dist, const ArrivalTrace& trace) {
    DirectSim sim(instance, weights, dist);
    for (const auto& id : trace.arrivals) sim.arrive(id);
    SimResult r;
    r.state = sim.state();
    r.value = sim.value();
    return r;
}

SimResult simulate_maximal(const DagInstance& instance, const DagWeights& weights,
                           const DistanceMap& dist, const ArrivalTrace& trace) {
    MaximalSim sim(instance, weights, dist);
    for (const auto& id : trace.arrivals) sim.arrive(id);
    SimResult r;
    r.state = sim.state();
    r.value = sim.value();
    return r;
}

SimResult simulate_greedy_integral(const DagInstance& instance, const ArrivalTrace& trace) {
    GreedySim sim(instance);
    for (const auto& id : trace.arrivals) sim.arrive(id);
    SimResult r;
    r.state = sim.state();
    r.value = sim.value();
    return r;
}

SimResult simulate(Policy policy, const DagInstance& instance, const DagWeights& weights,
                   const DistanceMap& dist, const ArrivalTrace& trace) {
    switch (policy) {
        case Policy::Direct: return simulate_direct(instance, weights, dist, trace);
        case Policy::Maximal: return simulate_maximal(instance, weights, dist, trace);
        case Policy::Greedy: return simulate_greedy_integral(instance, trace);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown policy");
}

AdaptiveRun run_with_adversary(Policy policy, const DagInstance& instance,
                               const DagWeights& weights, const DistanceMap& dist,
                               AdversaryFn adversary) {
    AdaptiveRun run;
    // the three policies expose the same incremental surface
    DirectSim direct(instance, weights, dist);
    MaximalSim maximal(instance, weights, dist);
    GreedySim greedy(instance);

    auto current_state = [&]() -> OnlineState {
        switch (policy) {
            case Policy::Direct: return direct.state();
            case Policy::Maximal: return maximal.state();
            case Policy::Greedy: return greedy.state();
        }
        throw Error(ErrorKind::InvalidArgument, "unknown policy");
    };

    while (auto next = adversary(current_state())) {
        run.trace.arrivals.push_back(*next);
        switch (policy) {
            case Policy::Direct: direct.arrive(*next); break;
            case Policy::Maximal: maximal.arrive(*next); break;
            case Policy::Greedy: greedy.arrive(*next); break;
        }
    }
    run.result.state = current_state();
    run.result.value = run.result.state.value;
    return run;
}

bool has_residual_path(const DagInstance& instance, const std::map<std::string, double>& residual,
                       const std::string& type_id) {
    CompiledDag g = compile(instance);
    const ImpressionType* type = instance.find_type(type_id);
    if (!type) throw Error(ErrorKind::UnknownNodeReference, "unknown type '" + type_id + "'");

    std::vector<bool> open(g.node_ids.size() + 1, false);
    open[g.sink_index] = true;
    for (auto it = g.topo_order.rbegin(); it != g.topo_order.rend(); ++it) {
        std::size_t v = *it;
        if (residual.at(g.node_ids[v]) <= kResidualTol) continue;
        for (std::size_t w : g.out[v]) {
            if (open[w]) { open[v] = true; break; }
        }
    }
    for (const auto& id : type->neighbors) {
        if (open[g.index_of.at(id)]) return true;
    }
    return false;
}

// ---- adaptive bipartite ----

AdaptiveResult simulate_adaptive_bipartite(const DagInstance& instance,
                                           const std::map<std::string, double>& predicted_log,
                                           double eps, const ArrivalTrace& trace,
                                           const AdaptiveOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "epsilon must be in (0,1)");
    }
    BipartiteView view = bipartite_view(instance);
    // zero-capacity advertisers are permanently blocked; drop them from the
    // neighborhoods so the water level never chases a zero threshold
    for (auto& nb : view.type_neighbors) {
        std::erase_if(nb, [&](std::size_t a) { return view.capacity[a] <= 0.0; });
    }
    const std::size_t n = view.capacity.size();
    const double log_eps = std::log1p(eps);
    const long long decrement_cap = static_cast<long long>(
        std::ceil(2.0 * static_cast<double>(n) * std::log(options.eta_bound) / log_eps));

    std::vector<double> w_log(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        auto it = predicted_log.find(view.ids[a]);
        if (it == predicted_log.end()) {
            throw Error(ErrorKind::UnknownNodeReference,
                        "prediction missing for advertiser '" + view.ids[a] + "'");
        }
        w_log[a] = it->second;
    }

    std::vector<double> real_alloc(n, 0.0);
    std::vector<double> imag_alloc(n, 0.0);
    std::vector<std::pair<std::size_t, double>> processed;  // (type, assigned mass)
    std::vector<double> threshold(n);
    for (std::size_t a = 0; a < n; ++a) threshold[a] = (1.0 + eps) * (1.0 + eps) * view.capacity[a];

    long long decrements = 0;
    std::vector<double> gammas;
    double value = 0.0;

    auto fractions_for = [&](std::size_t type) {
        const auto& nb = view.type_neighbors[type];
        std::vector<double> lw(nb.size());
        for (std::size_t j = 0; j < nb.size(); ++j) lw[j] = w_log[nb[j]];
        return proportional_fractions(lw);
    };

    auto recompute_imaginary = [&]() {
        std::fill(imag_alloc.begin(), imag_alloc.end(), 0.0);
        for (const auto& [type, mass] : processed) {
            const auto& nb = view.type_neighbors[type];
            auto x = fractions_for(type);
            for (std::size_t j = 0; j < nb.size(); ++j) imag_alloc[nb[j]] += mass * x[j];
        }
    };

    auto truncated_sum = [&]() {
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a) s += std::min(real_alloc[a], view.capacity[a]);
        return s;
    };

    for (const auto& id : trace.arrivals) {
        const ImpressionType* type = instance.find_type(id);
        if (!type) throw Error(ErrorKind::UnknownNodeReference, "unknown type '" + id + "'");
        std::size_t ti = 0;
        for (; ti < instance.impression_types.size(); ++ti) {
            if (instance.impression_types[ti].id == id) break;
        }
        const auto& nb = view.type_neighbors[ti];
        double before = truncated_sum();
        double assigned = 0.0;
        processed.emplace_back(ti, 0.0);

        if (!nb.empty()) {
            while (assigned < 1.0 - kResidualTol) {
                auto x = fractions_for(ti);
                double step = 1.0 - assigned;
                for (std::size_t j = 0; j < nb.size(); ++j) {
                    if (x[j] <= 0.0) continue;
                    double room = threshold[nb[j]] - imag_alloc[nb[j]];
                    if (room < 0.0) room = 0.0;
                    step = std::min(step, room / x[j]);
                }
                if (step > 0.0) {
                    for (std::size_t j = 0; j < nb.size(); ++j) {
                        real_alloc[nb[j]] += step * x[j];
                        imag_alloc[nb[j]] += step * x[j];
                    }
                    assigned += step;
                    processed.back().second = assigned;
                }

                // drop every weight at threshold, then rebuild the imaginary
                // instance; repeat while anything is still over
                bool dropped = false;
                while (true) {
                    bool any = false;
                    for (std::size_t a = 0; a < n; ++a) {
                        if (imag_alloc[a] >= threshold[a] * (1.0 - 1e-12) &&
                            imag_alloc[a] > 0.0 && view.capacity[a] > 0.0) {
                            w_log[a] -= log_eps;
                            ++decrements;
                            any = true;
                        }
                    }
                    if (!any) break;
                    dropped = true;
                    if (decrements > decrement_cap) {
                        throw Error(ErrorKind::NonTermination,
                                    "adaptive run exceeded " + std::to_string(decrement_cap) +
                                        " decrements; instance likely violates the assignability "
                                        "assumptions");
                    }
                    recompute_imaginary();
                }
                if (!dropped && assigned < 1.0 - kResidualTol && step <= 0.0) {
                    // no growth and no event: only possible when every
                    // neighbor has zero capacity
                    break;
                }
            }
        }
        gammas.push_back(truncated_sum() - before);
        value = truncated_sum();
    }

    AdaptiveResult result;
    result.value = value;
    result.decrement_count = decrements;
    for (std::size_t a = 0; a < n; ++a) {
        result.alloc[view.ids[a]] = real_alloc[a];
        result.final_log_weights[view.ids[a]] = w_log[a];
        result.state.residual[view.ids[a]] = std::max(view.capacity[a] - real_alloc[a], 0.0);
        if (result.state.residual[view.ids[a]] <= kResidualTol) {
            result.state.blocked.insert(view.ids[a]);
        }
    }
    result.state.value = value;
    result.state.gamma = gammas;
    return result;
}

ParameterError parameter_error(const std::map<std::string, double>& predicted_log,
                               const std::map<std::string, double>& reference_log) {
    if (predicted_log.size() != reference_log.size()) {
        throw Error(ErrorKind::InvalidArgument, "weight maps cover different node sets");
    }
    double pmin = std::numeric_limits<double>::infinity();
    double rmin = std::numeric_limits<double>::infinity();
    for (const auto& [id, lg] : predicted_log) {
        if (!reference_log.count(id)) {
            throw Error(ErrorKind::InvalidArgument, "weight maps cover different node sets");
        }
        pmin = std::min(pmin, lg);
        rmin = std::min(rmin, reference_log.at(id));
    }
    double worst = 0.0;
    for (const auto& [id, lg] : predicted_log) {
        double diff = (lg - pmin) - (reference_log.at(id) - rmin);
        worst = std::max(worst, std::abs(diff));
    }
    return ParameterError{std::exp(worst)};
}

// ---- generators ----

LowerBoundInstance gen_bipartite_lowerbound(int n, int s, double eps, std::uint64_t seed) {
    if (!(s > 0 && s < n)) {
        throw Error(ErrorKind::InvalidArgument, "need 0 < s < n");
    }
    Rng rng(seed);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);

    LowerBoundInstance lb;
    lb.p = static_cast<double>(n - s) / n;
    auto adv = [&](int i) { return "a" + std::to_string(i + 1); };

    lb.instance.sink = "t";
    for (int i = 0; i < n; ++i) {
        lb.instance.offline_nodes.push_back({adv(i), Rational(1)});
        lb.instance.edges.emplace_back(adv(i), "t");
    }
    ImpressionType full;
    full.id = "full";
    full.count = Rational(s);
    for (int i = 0; i < n; ++i) full.neighbors.push_back(adv(i));
    ImpressionType restricted;
    restricted.id = "restricted";
    restricted.count = Rational(n - s);
    for (int j = s; j < n; ++j) restricted.neighbors.push_back(adv(perm[j]));
    lb.instance.impression_types.push_back(full);
    lb.instance.impression_types.push_back(restricted);

    for (int k = 0; k < s; ++k) lb.trace.arrivals.push_back("full");
    for (int k = s; k < n; ++k) lb.trace.arrivals.push_back("restricted");

    double w1 = lb.p / eps;
    for (int j = 0; j < n; ++j) {
        lb.planted_weights.weight_log[adv(perm[j])] = j < s ? std::log(w1) : 0.0;
    }
    lb.planted_weights.weight_log["t"] = 0.0;
    lb.planted_weights.rho_base = 2.0 * n;
    lb.planted_eta = std::max(w1, 1.0 / w1);
    return lb;
}

WorstCaseDag gen_worstcase_dag(int d) {
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "need d >= 1");
    WorstCaseDag wc;
    wc.d = d;
    wc.instance.sink = "t";
    auto name = [](int layer, int i) {
        return "L" + std::to_string(layer) + "_" + std::to_string(i);
    };
    for (int j = 1; j <= d; ++j) {
        int width = 1 << j;
        for (int i = 0; i < width; ++i) {
            wc.instance.offline_nodes.push_back({name(j, i), Rational(1)});
            if (j < d) {
                wc.instance.edges.emplace_back(name(j, i), name(j + 1, 2 * i));
                wc.instance.edges.emplace_back(name(j, i), name(j + 1, 2 * i + 1));
            } else {
                wc.instance.edges.emplace_back(name(j, i), "t");
            }
        }
    }
    wc.initial_type = "i0";
    ImpressionType i0;
    i0.id = "i0";
    i0.count = Rational(0);
    i0.neighbors = {name(1, 0), name(1, 1)};
    wc.instance.impression_types.push_back(i0);
    for (const auto& node : wc.instance.offline_nodes) {
        ImpressionType pin;
        pin.id = "pin_" + node.id;
        pin.count = Rational(0);
        pin.neighbors = {node.id};
        wc.instance.impression_types.push_back(pin);
    }
    return wc;
}

AdversaryFn worstcase_adversary(const WorstCaseDag& wc) {
    // state machine: emit i0, read the chosen path, then pin its vertices
    auto emitted = std::make_shared<int>(0);
    auto path = std::make_shared<std::vector<std::string>>();
    int d = wc.d;
    std::string initial = wc.initial_type;
    return [emitted, path, d, initial](const OnlineState& state) -> std::optional<std::string> {
        if (*emitted == 0) {
            *emitted = 1;
            return initial;
        }
        if (*emitted == 1) {
            // per layer, the vertex the algorithm consumed: minimum residual,
            // lowest id on ties
            path->clear();
            for (int j = 1; j <= d; ++j) {
                std::string prefix = "L" + std::to_string(j) + "_";
                std::string best;
                double best_residual = std::numeric_limits<double>::infinity();
                for (const auto& [id, res] : state.residual) {
                    if (id.rfind(prefix, 0) != 0) continue;
                    if (res < best_residual - 1e-15) {
                        best_residual = res;
                        best = id;
                    }
                }
                path->push_back(best);
            }
            *emitted = 2;
        }
        std::size_t k = static_cast<std::size_t>(*emitted) - 2;
        if (k >= path->size()) return std::nullopt;
        *emitted += 1;
        return "pin_" + (*path)[k];
    };
}

}  // namespace propflow
