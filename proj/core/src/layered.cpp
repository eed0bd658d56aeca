#include "propflow/layered.hpp"

#include <algorithm>

#include "propflow/errors.hpp"

namespace propflow {

void LayeredGraph::rebuild_indexes() {
    layer_members.assign(d, {});
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        if (nodes[v].layer < 1 || nodes[v].layer > d) {
            throw Error(ErrorKind::InvalidArgument, "layer out of range for " + node_name(v));
        }
        layer_members[nodes[v].layer - 1].push_back(v);
    }
    in.assign(nodes.size(), {});
    for (std::size_t u = 0; u < nodes.size(); ++u) {
        for (std::size_t v : out[u]) {
            if (nodes[v].layer != nodes[u].layer + 1) {
                throw Error(ErrorKind::InvalidArgument,
                            "edge " + node_name(u) + " -> " + node_name(v) + " skips a layer");
            }
            in[v].push_back(u);
        }
    }
    max_layer_size = 0;
    for (const auto& members : layer_members) max_layer_size = std::max(max_layer_size, members.size());
    copy_chains.clear();
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        if (nodes[v].origin != sink_id) copy_chains[nodes[v].origin].push_back(v);
    }
    for (auto& [origin, chain] : copy_chains) {
        std::sort(chain.begin(), chain.end(),
                  [&](std::size_t a, std::size_t b) { return nodes[a].layer < nodes[b].layer; });
    }
}

LayeredGraph reduce_to_layered(const DagInstance& instance, const DistanceMap& dist) {
    CompiledDag g = compile(instance);
    LayeredGraph lg;
    lg.sink_id = instance.sink;
    lg.d = dist.offline_depth();
    if (lg.d == 0) {
        // no impression reaches any offline node; an empty layered graph
        lg.rebuild_indexes();
        return lg;
    }

    // provisional nodes: copies of each reached offline node in layers
    // 1..(d_v - 1) and of the sink in layers 1..d
    std::map<std::pair<std::string, int>, std::size_t> index;  // (origin, layer) -> node
    auto add_copy = [&](const std::string& origin, int layer, bool real, const Rational& cap,
                        bool unbounded) {
        LayeredNode n;
        n.origin = origin;
        n.layer = layer;
        n.is_real = real;
        n.capacity = cap;
        n.unbounded = unbounded;
        index[{origin, layer}] = lg.nodes.size();
        lg.nodes.push_back(std::move(n));
    };

    for (const auto& node : instance.offline_nodes) {
        if (!dist.reached(node.id)) continue;
        int real_layer = dist.at(node.id) - 1;
        for (int j = 1; j <= real_layer; ++j) {
            bool real = (j == real_layer);
            add_copy(node.id, j, real, node.capacity, /*unbounded=*/!real);
        }
    }
    for (int j = 1; j <= lg.d; ++j) add_copy(instance.sink, j, false, Rational(0), true);

    lg.out.assign(lg.nodes.size(), {});
    auto link = [&](const std::string& from, int from_layer, const std::string& to, int to_layer) {
        auto iu = index.find({from, from_layer});
        auto iv = index.find({to, to_layer});
        if (iu == index.end() || iv == index.end()) return;
        lg.out[iu->second].push_back(iv->second);
    };

    // chain edges between consecutive copies of one origin
    for (const auto& [key, idx] : index) {
        const auto& [origin, layer] = key;
        if (layer < lg.d && index.count({origin, layer + 1})) link(origin, layer, origin, layer + 1);
    }
    // cross edges out of real copies
    for (const auto& [u, v] : instance.edges) {
        if (!dist.reached(u)) continue;
        int lu = dist.at(u) - 1;
        if (lu >= lg.d) continue;  // heads straight into the sink, kept implicit
        link(u, lu, v, lu + 1);
    }

    // impression layer
    for (const auto& t : instance.impression_types) {
        LayeredType lt;
        lt.id = t.id;
        lt.count = t.count.to_double();
        lt.count_exact = t.count;
        for (const auto& v : t.neighbors) {
            auto it = index.find({v, 1});
            if (it != index.end()) lt.neighbors.push_back(it->second);
        }
        lg.types.push_back(std::move(lt));
    }

    // drop copies no impression reaches
    std::vector<bool> reached(lg.nodes.size(), false);
    for (const auto& t : lg.types)
        for (std::size_t v : t.neighbors) reached[v] = true;
    // out-edges only go forward one layer, so a pass in layer order settles it
    std::vector<std::size_t> by_layer(lg.nodes.size());
    for (std::size_t v = 0; v < lg.nodes.size(); ++v) by_layer[v] = v;
    std::sort(by_layer.begin(), by_layer.end(),
              [&](std::size_t a, std::size_t b) { return lg.nodes[a].layer < lg.nodes[b].layer; });
    for (std::size_t u : by_layer) {
        if (!reached[u]) continue;
        for (std::size_t v : lg.out[u]) reached[v] = true;
    }

    std::vector<std::size_t> remap(lg.nodes.size(), SIZE_MAX);
    LayeredGraph pruned;
    pruned.sink_id = lg.sink_id;
    pruned.d = lg.d;
    for (std::size_t v = 0; v < lg.nodes.size(); ++v) {
        if (!reached[v]) continue;
        remap[v] = pruned.nodes.size();
        pruned.nodes.push_back(lg.nodes[v]);
    }
    pruned.out.assign(pruned.nodes.size(), {});
    for (std::size_t u = 0; u < lg.nodes.size(); ++u) {
        if (remap[u] == SIZE_MAX) continue;
        for (std::size_t v : lg.out[u])
            if (remap[v] != SIZE_MAX) pruned.out[remap[u]].push_back(remap[v]);
    }
    for (auto& t : lg.types) {
        LayeredType lt = t;
        lt.neighbors.clear();
        for (std::size_t v : t.neighbors)
            if (remap[v] != SIZE_MAX) lt.neighbors.push_back(remap[v]);
        pruned.types.push_back(std::move(lt));
    }
    pruned.rebuild_indexes();
    return pruned;
}

DagInstance layered_as_instance(const LayeredGraph& g, const Rational& supply_bound) {
    DagInstance inst;
    inst.sink = g.sink_id.empty() ? std::string("t") : g.sink_id;
    // layered node names double as instance node ids
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        Rational cap = g.nodes[v].unbounded ? supply_bound : g.nodes[v].capacity;
        inst.offline_nodes.push_back({g.node_name(v), cap});
    }
    for (std::size_t u = 0; u < g.nodes.size(); ++u) {
        for (std::size_t v : g.out[u]) inst.edges.emplace_back(g.node_name(u), g.node_name(v));
        if (g.nodes[u].layer == g.d) inst.edges.emplace_back(g.node_name(u), inst.sink);
    }
    for (const auto& t : g.types) {
        ImpressionType it;
        it.id = t.id;
        it.count = t.count_exact;
        for (std::size_t v : t.neighbors) it.neighbors.push_back(g.node_name(v));
        inst.impression_types.push_back(std::move(it));
    }
    return inst;
}

}  // namespace propflow
