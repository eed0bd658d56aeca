#include "propflow/max_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "propflow/errors.hpp"

namespace propflow {

IntMaxFlow::IntMaxFlow(std::size_t node_count) : adj_(node_count) {}

std::size_t IntMaxFlow::add_arc(std::size_t from, std::size_t to, std::int64_t capacity) {
    Arc fwd{to, capacity, adj_[to].size()};
    Arc bwd{from, 0, adj_[from].size()};
    adj_[from].push_back(fwd);
    adj_[to].push_back(bwd);
    arc_handle_.emplace_back(from, adj_[from].size() - 1);
    initial_cap_.push_back(capacity);
    return arc_handle_.size() - 1;
}

bool IntMaxFlow::bfs_levels(std::size_t s, std::size_t t) {
    level_.assign(adj_.size(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
        std::size_t u = q.front();
        q.pop();
        for (const Arc& a : adj_[u]) {
            if (a.cap > 0 && level_[a.to] < 0) {
                level_[a.to] = level_[u] + 1;
                q.push(a.to);
            }
        }
    }
    return level_[t] >= 0;
}

std::int64_t IntMaxFlow::dfs_push(std::size_t u, std::size_t t, std::int64_t limit) {
    if (u == t) return limit;
    for (std::size_t& i = iter_[u]; i < adj_[u].size(); ++i) {
        Arc& a = adj_[u][i];
        if (a.cap <= 0 || level_[a.to] != level_[u] + 1) continue;
        std::int64_t pushed = dfs_push(a.to, t, std::min(limit, a.cap));
        if (pushed > 0) {
            a.cap -= pushed;
            adj_[a.to][a.rev].cap += pushed;
            return pushed;
        }
    }
    return 0;
}

std::int64_t IntMaxFlow::run(std::size_t source, std::size_t sink) {
    std::int64_t total = 0;
    while (bfs_levels(source, sink)) {
        iter_.assign(adj_.size(), 0);
        while (std::int64_t pushed = dfs_push(source, sink, std::numeric_limits<std::int64_t>::max())) {
            total += pushed;
        }
    }
    return total;
}

std::int64_t IntMaxFlow::flow_on(std::size_t arc) const {
    auto [node, slot] = arc_handle_[arc];
    return initial_cap_[arc] - adj_[node][slot].cap;
}

bool IntMaxFlow::conserved(std::size_t source, std::size_t sink) const {
    std::vector<std::int64_t> net(adj_.size(), 0);
    for (std::size_t a = 0; a < arc_handle_.size(); ++a) {
        auto [from, slot] = arc_handle_[a];
        std::int64_t f = initial_cap_[a] - adj_[from][slot].cap;
        net[from] -= f;
        net[adj_[from][slot].to] += f;
    }
    for (std::size_t u = 0; u < adj_.size(); ++u) {
        if (u == source || u == sink) continue;
        if (net[u] != 0) return false;
    }
    return true;
}

OracleResult max_flow_oracle(const DagInstance& instance) {
    CompiledDag g = compile(instance);
    const std::size_t n = g.node_ids.size();

    // common denominator over all capacities and counts
    std::int64_t scale = 1;
    for (const auto& node : instance.offline_nodes) scale = checked_lcm(scale, node.capacity.den());
    for (const auto& t : instance.impression_types) scale = checked_lcm(scale, t.count.den());

    auto scaled = [&](const Rational& r) -> std::int64_t {
        __int128 v = static_cast<__int128>(r.num()) * (scale / r.den());
        if (v > std::numeric_limits<std::int64_t>::max() / 4) {
            throw Error(ErrorKind::CapacityOverflow, "scaled capacity too large; shrink the instance");
        }
        return static_cast<std::int64_t>(v);
    };

    __int128 finite_total = 0;
    for (const auto& t : instance.impression_types) finite_total += scaled(t.count);
    if (finite_total > std::numeric_limits<std::int64_t>::max() / 4) {
        throw Error(ErrorKind::CapacityOverflow, "scaled supply too large; shrink the instance");
    }
    const std::int64_t unbounded = static_cast<std::int64_t>(finite_total) + 1;

    // network layout: 0 = source, 1 = sink,
    // type arcs, then v_in = 2 + m + 2i, v_out = v_in + 1
    const std::size_t types = instance.impression_types.size();
    const std::size_t source = 0, sink = 1;
    auto type_node = [&](std::size_t i) { return 2 + i; };
    auto v_in = [&](std::size_t v) { return 2 + types + 2 * v; };
    auto v_out = [&](std::size_t v) { return 2 + types + 2 * v + 1; };

    IntMaxFlow net(2 + types + 2 * n);
    std::vector<std::size_t> node_arc(n);
    for (std::size_t i = 0; i < types; ++i) {
        net.add_arc(source, type_node(i), scaled(instance.impression_types[i].count));
        for (std::size_t v : g.type_neighbors[i]) net.add_arc(type_node(i), v_in(v), unbounded);
    }
    for (std::size_t v = 0; v < n; ++v) {
        node_arc[v] = net.add_arc(v_in(v), v_out(v), scaled(instance.offline_nodes[v].capacity));
    }
    for (const auto& [u, vtx] : instance.edges) {
        std::size_t ui = g.index_of.at(u);
        std::size_t vi = g.index_of.at(vtx);
        if (vi == g.sink_index) {
            net.add_arc(v_out(ui), sink, unbounded);
        } else {
            net.add_arc(v_out(ui), v_in(vi), unbounded);
        }
    }

    std::int64_t value = net.run(source, sink);
    if (!net.conserved(source, sink)) {
        throw Error(ErrorKind::InvalidArgument, "max-flow conservation check failed");
    }

    OracleResult result;
    result.opt_value = Rational(value, scale);
    for (std::size_t v = 0; v < n; ++v) {
        result.per_node_flow[g.node_ids[v]] = Rational(net.flow_on(node_arc[v]), scale);
    }
    return result;
}

}  // namespace propflow
