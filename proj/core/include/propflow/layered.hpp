#ifndef PROPFLOW_LAYERED_HPP
#define PROPFLOW_LAYERED_HPP

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "propflow/distances.hpp"
#include "propflow/instance.hpp"

namespace propflow {

struct LayeredNode {
    std::string origin;  // original node id (offline node or the sink)
    int layer = 1;       // 1..d
    bool is_real = false;
    bool unbounded = false;  // virtual copies and sink copies
    Rational capacity;       // meaningful only when !unbounded
};

struct LayeredType {
    std::string id;
    double count = 0;
    Rational count_exact;
    std::vector<std::size_t> neighbors;  // layer-1 node indices
};

// Layered form of a DagInstance. Offline layers are numbered 1..d; the
// impression layer is kept separately in `types`. Nodes in layer d route
// to the sink implicitly.
struct LayeredGraph {
    std::vector<LayeredNode> nodes;
    std::vector<std::vector<std::size_t>> layer_members;  // layer_members[j-1] = layer j
    std::vector<std::vector<std::size_t>> out;            // edges to the next layer only
    std::vector<std::vector<std::size_t>> in;
    std::map<std::string, std::vector<std::size_t>> copy_chains;  // offline origin -> copies by layer
    std::vector<LayeredType> types;
    int d = 0;                      // number of offline layers
    std::size_t max_layer_size = 0; // the n in epsilon schedules and thresholds
    std::string sink_id;

    double capacity_double(std::size_t v) const {
        return nodes[v].unbounded ? std::numeric_limits<double>::infinity()
                                  : nodes[v].capacity.to_double();
    }

    std::string node_name(std::size_t v) const {
        return nodes[v].origin + "~" + std::to_string(nodes[v].layer);
    }

    // Recompute layer_members, in-lists and max_layer_size from nodes/out.
    // Call after building a LayeredGraph by hand (tests, generators).
    void rebuild_indexes();
};

// The construction: chain edges between consecutive copies of one origin,
// cross edges from each real copy to the next layer's copy of the edge head,
// sink copies with unbounded capacity, and removal of nodes no impression
// reaches. Max-flow value is preserved in both directions.
LayeredGraph reduce_to_layered(const DagInstance& instance, const DistanceMap& dist);

// View a layered graph as a plain DagInstance (for the exact oracle).
// Unbounded copies get `supply_bound` as capacity, which no feasible flow
// can exceed.
DagInstance layered_as_instance(const LayeredGraph& g, const Rational& supply_bound);

}  // namespace propflow

#endif
