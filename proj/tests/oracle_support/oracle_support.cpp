#include "oracle_support.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "propflow/errors.hpp"

namespace propflow::oracle {

ComparisonReport compare(double reference, double candidate, double abs_tol, double rel_tol) {
    ComparisonReport r;
    r.reference = reference;
    r.candidate = candidate;
    r.abs_gap = std::abs(reference - candidate);
    double denom = std::max(std::abs(reference), std::abs(candidate));
    r.rel_gap = denom > 0 ? r.abs_gap / denom : 0.0;
    r.pass = r.abs_gap <= abs_tol || r.rel_gap <= rel_tol;
    return r;
}

// Written straight from the definitions for adjacent-layer instances:
// fractions are plain weight ratios, nodes forward min(inflow, C) in
// distance order. Dense matrices, no log-space arithmetic.
double dense_route_reference(const DagInstance& instance,
                             const std::map<std::string, double>& node_weight) {
    if (instance.offline_nodes.size() > 12) {
        throw Error(ErrorKind::SizeLimit, "dense reference accepts at most 12 offline nodes");
    }
    std::vector<std::string> ids;
    for (const auto& n : instance.offline_nodes) ids.push_back(n.id);
    ids.push_back(instance.sink);
    const std::size_t n = ids.size();
    auto idx = [&](const std::string& id) {
        for (std::size_t i = 0; i < n; ++i)
            if (ids[i] == id) return i;
        throw Error(ErrorKind::UnknownNodeReference, id);
    };

    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (const auto& [u, v] : instance.edges) adj[idx(u)][idx(v)] = true;

    std::vector<double> weight(n, 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto it = node_weight.find(ids[i]);
        weight[i] = it == node_weight.end() ? 1.0 : it->second;
    }

    // longest distances from the dummy source, impressions at 1
    std::vector<int> dist(n, -1);
    for (const auto& t : instance.impression_types) {
        for (const auto& v : t.neighbors) dist[idx(v)] = std::max(dist[idx(v)], 2);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t u = 0; u + 1 < n; ++u) {
            if (dist[u] < 0) continue;
            for (std::size_t v = 0; v < n; ++v) {
                if (adj[u][v] && dist[u] + 1 > dist[v]) {
                    dist[v] = dist[u] + 1;
                    changed = true;
                }
            }
        }
    }
    for (std::size_t u = 0; u + 1 < n; ++u) {
        if (dist[u] < 0) continue;
        for (std::size_t v = 0; v + 1 < n; ++v) {
            if (adj[u][v] && dist[v] != dist[u] + 1) {
                throw Error(ErrorKind::InvalidArgument,
                            "dense reference expects adjacent-layer instances");
            }
        }
    }

    std::vector<double> inflow(n, 0.0);
    for (const auto& t : instance.impression_types) {
        double total = 0;
        for (const auto& vid : t.neighbors) total += weight[idx(vid)];
        if (total <= 0) continue;
        for (const auto& vid : t.neighbors) {
            inflow[idx(vid)] += t.count.to_double() * weight[idx(vid)] / total;
        }
    }

    std::vector<std::size_t> order;
    for (std::size_t u = 0; u + 1 < n; ++u)
        if (dist[u] >= 0) order.push_back(u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    for (std::size_t u : order) {
        double cap = instance.offline_nodes[u].capacity.to_double();
        double forward = std::min(inflow[u], cap);
        double total = 0;
        for (std::size_t v = 0; v < n; ++v)
            if (adj[u][v]) total += weight[v];
        if (total <= 0) continue;
        for (std::size_t v = 0; v < n; ++v) {
            if (adj[u][v]) inflow[v] += forward * weight[v] / total;
        }
    }
    return inflow[n - 1];
}

namespace {

void grid_search(const ScheduleInstance& instance, int job, int divisions,
                 std::vector<double>& loads, double& best) {
    if (job == static_cast<int>(instance.jobs.size())) {
        double makespan = *std::max_element(loads.begin(), loads.end());
        best = std::min(best, makespan);
        return;
    }
    double current = *std::max_element(loads.begin(), loads.end());
    if (current >= best) return;

    const Job& j = instance.jobs[job];
    const auto& nb = j.neighborhood;
    double size = j.size.to_double();
    std::vector<int> units(nb.size(), 0);
    auto rec = [&](auto&& self, std::size_t slot, int remaining) -> void {
        if (slot + 1 == units.size()) {
            units[slot] = remaining;
            for (std::size_t i = 0; i < nb.size(); ++i) {
                loads[nb[i] - 1] += size * units[i] / divisions;
            }
            grid_search(instance, job + 1, divisions, loads, best);
            for (std::size_t i = 0; i < nb.size(); ++i) {
                loads[nb[i] - 1] -= size * units[i] / divisions;
            }
            return;
        }
        for (int u = 0; u <= remaining; ++u) {
            units[slot] = u;
            self(self, slot + 1, remaining - u);
        }
    };
    rec(rec, 0, divisions);
}

}  // namespace

double enumerate_assignments(const ScheduleInstance& instance, int grid_divisions) {
    if (instance.machines > 3 || instance.jobs.size() > 6) {
        throw Error(ErrorKind::SizeLimit, "grid enumeration accepts m <= 3, n <= 6");
    }
    if (instance.jobs.empty()) return 0.0;
    std::vector<double> loads(instance.machines, 0.0);
    double best = instance.total_size().to_double() + 1.0;
    grid_search(instance, 0, grid_divisions, loads, best);
    return best;
}

double bottleneck_makespan(const ScheduleInstance& instance) {
    if (instance.machines > 10) {
        throw Error(ErrorKind::SizeLimit, "bottleneck enumeration accepts m <= 10");
    }
    if (instance.jobs.empty()) return 0.0;
    double best = 0.0;
    for (int mask = 1; mask < (1 << instance.machines); ++mask) {
        double total = 0.0;
        for (const auto& job : instance.jobs) {
            bool inside = true;
            for (int m : job.neighborhood) {
                if (!(mask & (1 << (m - 1)))) { inside = false; break; }
            }
            if (inside) total += job.size.to_double();
        }
        best = std::max(best, total / __builtin_popcount(mask));
    }
    return best;
}

}  // namespace propflow::oracle
