#ifndef PROPFLOW_INSTANCE_HPP
#define PROPFLOW_INSTANCE_HPP

#include <iosfwd>
#include <string>
#include <map>
#include <unordered_map>
#include <vector>

#include "propflow/rational.hpp"

namespace propflow {

struct OfflineNode {
    std::string id;
    Rational capacity;  // finite, >= 0
};

struct ImpressionType {
    std::string id;
    std::vector<std::string> neighbors;  // offline node ids
    Rational count;                      // finite, >= 0; fractional counts are legal
};

// The offline DAG plus the impression types. This is the unit every
// computation in the library operates on.
struct DagInstance {
    std::vector<OfflineNode> offline_nodes;
    std::string sink;
    std::vector<std::pair<std::string, std::string>> edges;  // over offline nodes and the sink
    std::vector<ImpressionType> impression_types;

    const OfflineNode* find_node(const std::string& id) const;
    const ImpressionType* find_type(const std::string& id) const;
    Rational total_count() const;
};

// Index-based view used by the algorithms. Node index n == sink.
struct CompiledDag {
    std::vector<std::string> node_ids;  // offline nodes, original order
    std::size_t sink_index = 0;         // == node_ids.size()
    std::unordered_map<std::string, std::size_t> index_of;
    std::vector<std::vector<std::size_t>> out;      // offline + sink adjacency
    std::vector<std::vector<std::size_t>> in;
    std::vector<double> capacity;                   // offline capacities as doubles
    std::vector<std::size_t> topo_order;            // offline nodes only, sources first
    std::vector<std::vector<std::size_t>> type_neighbors;  // per impression type
    std::vector<double> type_count;
};

// Checks every DagInstance invariant; throws Error naming the offending
// element (CyclicGraph, UnreachableSink, UnknownNodeReference, NegativeValue).
void validate(const DagInstance& instance);

// validate() plus index compilation, for the algorithm paths.
CompiledDag compile(const DagInstance& instance);

// Instance file grammar is documented in the README. Unknown section names
// and malformed lines are rejected with the line number.
DagInstance parse_instance(std::istream& in);
DagInstance load_instance(const std::string& path);
void write_instance(const DagInstance& instance, std::ostream& out);

// Copy of `instance` with type counts replaced (types absent from `counts`
// get 0). Used to evaluate one graph at many realized instance vectors.
DagInstance with_counts(const DagInstance& instance,
                        const std::map<std::string, Rational>& counts);

}  // namespace propflow

#endif
