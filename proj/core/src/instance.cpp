#include "propflow/instance.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "propflow/errors.hpp"

namespace propflow {

const OfflineNode* DagInstance::find_node(const std::string& id) const {
    for (const auto& n : offline_nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const ImpressionType* DagInstance::find_type(const std::string& id) const {
    for (const auto& t : impression_types)
        if (t.id == id) return &t;
    return nullptr;
}

Rational DagInstance::total_count() const {
    Rational total;
    for (const auto& t : impression_types) total = total + t.count;
    return total;
}

void validate(const DagInstance& instance) {
    compile(instance);
}

CompiledDag compile(const DagInstance& instance) {
    CompiledDag g;
    if (instance.sink.empty()) {
        throw Error(ErrorKind::UnknownNodeReference, "instance has no sink");
    }
    for (const auto& n : instance.offline_nodes) {
        if (g.index_of.count(n.id)) {
            throw Error(ErrorKind::UnknownNodeReference, "duplicate node id '" + n.id + "'");
        }
        if (n.id == instance.sink) {
            throw Error(ErrorKind::UnknownNodeReference, "node '" + n.id + "' reuses the sink id");
        }
        if (n.capacity.is_negative()) {
            throw Error(ErrorKind::NegativeValue, "capacity of node '" + n.id + "'");
        }
        g.index_of.emplace(n.id, g.node_ids.size());
        g.node_ids.push_back(n.id);
        g.capacity.push_back(n.capacity.to_double());
    }
    const std::size_t n = g.node_ids.size();
    g.sink_index = n;
    g.index_of.emplace(instance.sink, n);
    g.out.assign(n + 1, {});
    g.in.assign(n + 1, {});

    for (const auto& [u, v] : instance.edges) {
        auto iu = g.index_of.find(u);
        auto iv = g.index_of.find(v);
        if (iu == g.index_of.end()) {
            throw Error(ErrorKind::UnknownNodeReference, "edge tail '" + u + "'");
        }
        if (iv == g.index_of.end()) {
            throw Error(ErrorKind::UnknownNodeReference, "edge head '" + v + "'");
        }
        if (iu->second == g.sink_index) {
            throw Error(ErrorKind::UnknownNodeReference, "edge out of the sink '" + u + "'");
        }
        g.out[iu->second].push_back(iv->second);
        g.in[iv->second].push_back(iu->second);
    }

    // Kahn's algorithm over offline nodes + sink; leftover nodes mean a cycle.
    {
        std::vector<std::size_t> indeg(n + 1, 0);
        for (std::size_t u = 0; u <= n; ++u)
            for (std::size_t v : g.out[u]) indeg[v]++;
        std::vector<std::size_t> stack;
        for (std::size_t u = 0; u <= n; ++u)
            if (indeg[u] == 0) stack.push_back(u);
        std::vector<std::size_t> order;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            order.push_back(u);
            for (std::size_t v : g.out[u])
                if (--indeg[v] == 0) stack.push_back(v);
        }
        if (order.size() != n + 1) {
            for (std::size_t u = 0; u <= n; ++u) {
                if (indeg[u] > 0 && u != g.sink_index) {
                    throw Error(ErrorKind::CyclicGraph, "cycle through node '" + g.node_ids[u] + "'");
                }
            }
            throw Error(ErrorKind::CyclicGraph, "cycle detected");
        }
        g.topo_order.clear();
        for (std::size_t u : order)
            if (u != g.sink_index) g.topo_order.push_back(u);
    }

    // every offline node must reach the sink
    {
        std::vector<bool> reaches(n + 1, false);
        reaches[g.sink_index] = true;
        for (auto it = g.topo_order.rbegin(); it != g.topo_order.rend(); ++it) {
            for (std::size_t v : g.out[*it])
                if (reaches[v]) { reaches[*it] = true; break; }
        }
        for (std::size_t u = 0; u < n; ++u) {
            if (!reaches[u]) {
                throw Error(ErrorKind::UnreachableSink, "node '" + g.node_ids[u] + "' has no path to the sink");
            }
        }
    }

    for (const auto& t : instance.impression_types) {
        if (t.count.is_negative()) {
            throw Error(ErrorKind::NegativeValue, "count of type '" + t.id + "'");
        }
        std::vector<std::size_t> nb;
        for (const auto& v : t.neighbors) {
            auto it = g.index_of.find(v);
            if (it == g.index_of.end() || it->second == g.sink_index) {
                throw Error(ErrorKind::UnknownNodeReference,
                            "type '" + t.id + "' references '" + v + "'");
            }
            nb.push_back(it->second);
        }
        g.type_neighbors.push_back(std::move(nb));
        g.type_count.push_back(t.count.to_double());
    }
    return g;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace

DagInstance parse_instance(std::istream& in) {
    DagInstance inst;
    std::string line;
    std::size_t line_no = 0;
    enum class Section { None, Nodes, Edges, Types } section = Section::None;
    bool saw_sink = false;

    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;

        if (toks[0] == "nodes") {
            if (toks.size() != 1) parse_fail(line_no, "section header 'nodes' takes no arguments");
            section = Section::Nodes;
            continue;
        }
        if (toks[0] == "edges") {
            if (toks.size() != 1) parse_fail(line_no, "section header 'edges' takes no arguments");
            section = Section::Edges;
            continue;
        }
        if (toks[0] == "types") {
            if (toks.size() != 1) parse_fail(line_no, "section header 'types' takes no arguments");
            section = Section::Types;
            continue;
        }
        if (toks[0] == "sink") {
            if (toks.size() != 2) parse_fail(line_no, "expected 'sink <id>'");
            if (saw_sink) parse_fail(line_no, "duplicate sink");
            inst.sink = toks[1];
            saw_sink = true;
            section = Section::None;
            continue;
        }

        switch (section) {
            case Section::None:
                parse_fail(line_no, "unknown key '" + toks[0] + "'");
            case Section::Nodes: {
                if (toks.size() != 2) parse_fail(line_no, "expected '<id> <capacity>'");
                try {
                    inst.offline_nodes.push_back({toks[0], Rational::parse(toks[1])});
                } catch (const Error& e) {
                    parse_fail(line_no, e.what());
                }
                break;
            }
            case Section::Edges: {
                if (toks.size() != 2) parse_fail(line_no, "expected '<u> <v>'");
                inst.edges.emplace_back(toks[0], toks[1]);
                break;
            }
            case Section::Types: {
                if (toks.size() < 3) parse_fail(line_no, "expected '<id> <count> <neighbor>...'");
                ImpressionType t;
                t.id = toks[0];
                try {
                    t.count = Rational::parse(toks[1]);
                } catch (const Error& e) {
                    parse_fail(line_no, e.what());
                }
                t.neighbors.assign(toks.begin() + 2, toks.end());
                inst.impression_types.push_back(std::move(t));
                break;
            }
        }
    }
    if (!saw_sink) throw Error(ErrorKind::ParseError, "instance file has no 'sink' section");
    return inst;
}

DagInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return parse_instance(in);
}

void write_instance(const DagInstance& instance, std::ostream& out) {
    out << "nodes\n";
    for (const auto& n : instance.offline_nodes) out << n.id << " " << n.capacity.str() << "\n";
    out << "sink " << instance.sink << "\n";
    out << "edges\n";
    for (const auto& [u, v] : instance.edges) out << u << " " << v << "\n";
    out << "types\n";
    for (const auto& t : instance.impression_types) {
        out << t.id << " " << t.count.str();
        for (const auto& v : t.neighbors) out << " " << v;
        out << "\n";
    }
}

DagInstance with_counts(const DagInstance& instance,
                        const std::map<std::string, Rational>& counts) {
    DagInstance copy = instance;
    for (auto& t : copy.impression_types) {
        auto it = counts.find(t.id);
        t.count = it == counts.end() ? Rational(0) : it->second;
    }
    return copy;
}

}  // namespace propflow
