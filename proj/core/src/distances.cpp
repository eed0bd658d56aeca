#include "propflow/distances.hpp"

#include <algorithm>

#include "propflow/errors.hpp"

namespace propflow {

int DistanceMap::at(const std::string& id) const {
    auto it = d.find(id);
    if (it == d.end()) throw Error(ErrorKind::UnknownNodeReference, "no distance for '" + id + "'");
    return it->second;
}

bool DistanceMap::reached(const std::string& id) const {
    auto it = d.find(id);
    return it != d.end() && it->second != kUnreached;
}

int DistanceMap::offline_depth() const {
    int depth = 0;
    for (const auto& [id, dv] : d)
        if (dv > 0 && id != sink) depth = std::max(depth, dv - 1);
    return depth;
}

DistanceMap longest_distances(const DagInstance& instance) {
    CompiledDag g = compile(instance);
    const std::size_t n = g.node_ids.size();

    // dist[v] = longest path length from the dummy source; impressions at 1.
    std::vector<int> dist(n + 1, DistanceMap::kUnreached);
    for (const auto& nb : g.type_neighbors)
        for (std::size_t v : nb) dist[v] = 2;

    for (std::size_t u : g.topo_order) {
        if (dist[u] == DistanceMap::kUnreached) continue;
        for (std::size_t v : g.out[u]) dist[v] = std::max(dist[v], dist[u] + 1);
    }

    DistanceMap out;
    out.sink = instance.sink;
    for (std::size_t u = 0; u < n; ++u) out.d[g.node_ids[u]] = dist[u];
    out.d[instance.sink] = dist[g.sink_index];
    for (const auto& [u, v] : instance.edges) {
        int du = out.d.count(u) ? out.d[u] : DistanceMap::kUnreached;
        int dv = out.d.count(v) ? out.d[v] : DistanceMap::kUnreached;
        if (du != DistanceMap::kUnreached && dv != DistanceMap::kUnreached) {
            out.d_edge[{u, v}] = dv - du - 1;
        }
    }
    // sink copy: the sink's distance is only needed when some edge reaches it
    return out;
}

}  // namespace propflow
