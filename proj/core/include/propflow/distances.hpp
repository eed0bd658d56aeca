#ifndef PROPFLOW_DISTANCES_HPP
#define PROPFLOW_DISTANCES_HPP

#include <cstdint>
#include <map>
#include <string>

#include "propflow/instance.hpp"

namespace propflow {

// Longest distances from the implicit dummy source. The source is never
// materialized: every impression type sits at distance 1, offline nodes
// follow at >= 2. Offline nodes no impression can reach carry kUnreached
// and are dropped by the layered reduction.
struct DistanceMap {
    static constexpr int kUnreached = -1;

    std::map<std::string, int> d;                                  // offline nodes + sink
    std::map<std::pair<std::string, std::string>, int> d_edge;     // d_v - d_u - 1, reached edges only
    std::string sink;

    int at(const std::string& id) const;
    bool reached(const std::string& id) const;

    // number of offline layers: max over reached offline nodes of (d_v - 1)
    int offline_depth() const;
};

DistanceMap longest_distances(const DagInstance& instance);

}  // namespace propflow

#endif
