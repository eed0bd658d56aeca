#ifndef PROPFLOW_MAX_FLOW_HPP
#define PROPFLOW_MAX_FLOW_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "propflow/instance.hpp"

namespace propflow {

struct OracleResult {
    Rational opt_value;
    std::map<std::string, Rational> per_node_flow;  // flow crossing each offline node
};

// Exact node-capacitated max flow. Each offline node v is split into
// v_in -> v_out with arc capacity C_v, each impression type becomes an arc
// of capacity m_i, all capacities are scaled to a common denominator and an
// exact augmenting max flow runs over the integers. Throws CapacityOverflow
// when the scaling leaves the 64-bit range.
OracleResult max_flow_oracle(const DagInstance& instance);

// Small exact max-flow network shared by the oracle and the makespan
// feasibility check. Arc capacities are int64; kUnbounded marks arcs no
// feasible flow can saturate.
class IntMaxFlow {
public:
    static constexpr std::int64_t kUnbounded = -1;

    explicit IntMaxFlow(std::size_t node_count);

    // returns the arc index; reverse arc is created alongside
    std::size_t add_arc(std::size_t from, std::size_t to, std::int64_t capacity);

    std::int64_t run(std::size_t source, std::size_t sink);

    std::int64_t flow_on(std::size_t arc) const;

    // net flow must vanish at every node besides source and sink
    bool conserved(std::size_t source, std::size_t sink) const;

private:
    struct Arc {
        std::size_t to;
        std::int64_t cap;
        std::size_t rev;
    };

    bool bfs_levels(std::size_t s, std::size_t t);
    std::int64_t dfs_push(std::size_t u, std::size_t t, std::int64_t limit);

    std::vector<std::vector<Arc>> adj_;
    std::vector<std::pair<std::size_t, std::size_t>> arc_handle_;  // (node, slot)
    std::vector<std::int64_t> initial_cap_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
};

}  // namespace propflow

#endif
