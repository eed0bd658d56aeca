#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracle_support.hpp"
#include "propflow/distances.hpp"
#include "propflow/errors.hpp"
#include "propflow/generators.hpp"
#include "propflow/instance.hpp"
#include "propflow/layered.hpp"
#include "propflow/max_flow.hpp"

using namespace propflow;

namespace {

DagInstance chain_instance() {
    // i -> v -> t, one impression
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"v", Rational(1)});
    inst.edges.emplace_back("v", "t");
    inst.impression_types.push_back({"i", {"v"}, Rational(1)});
    return inst;
}

}  // namespace

TEST_CASE("validate accepts the minimal instance") {
    CHECK_NOTHROW(validate(chain_instance()));
}

TEST_CASE("validate rejects a 2-cycle") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"v", Rational(1)});
    inst.offline_nodes.push_back({"w", Rational(1)});
    inst.edges.emplace_back("v", "w");
    inst.edges.emplace_back("w", "v");
    inst.edges.emplace_back("v", "t");
    try {
        validate(inst);
        FAIL("expected CyclicGraph");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CyclicGraph);
    }
}

TEST_CASE("validate names the node that cannot reach the sink") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"v", Rational(1)});
    inst.offline_nodes.push_back({"stranded", Rational(1)});
    inst.edges.emplace_back("v", "t");
    try {
        validate(inst);
        FAIL("expected UnreachableSink");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnreachableSink);
        CHECK(std::string(e.what()).find("stranded") != std::string::npos);
    }
}

TEST_CASE("validate rejects unknown references and negative values") {
    DagInstance inst = chain_instance();
    inst.impression_types.push_back({"bad", {"ghost"}, Rational(1)});
    CHECK_THROWS_AS(validate(inst), Error);

    DagInstance neg = chain_instance();
    neg.offline_nodes[0].capacity = Rational(-1);
    try {
        validate(neg);
        FAIL("expected NegativeValue");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NegativeValue);
    }
}

TEST_CASE("longest distances on a chain") {
    DagInstance inst = chain_instance();
    auto dist = longest_distances(inst);
    CHECK(dist.at("v") == 2);
    CHECK(dist.offline_depth() == 1);
}

TEST_CASE("longest distances on the diamond with a skip edge") {
    DagInstance inst;
    inst.sink = "t";
    for (std::string id : {"a", "b", "c"}) inst.offline_nodes.push_back({id, Rational(1)});
    inst.edges.emplace_back("a", "c");
    inst.edges.emplace_back("b", "c");
    inst.edges.emplace_back("c", "t");
    inst.impression_types.push_back({"i", {"a", "b", "c"}, Rational(1)});
    auto dist = longest_distances(inst);
    CHECK(dist.at("a") == 2);
    CHECK(dist.at("b") == 2);
    CHECK(dist.at("c") == 3);
    // impressions sit at distance 1, so the i -> c edge skips one layer
    CHECK(dist.at("c") - 1 - 1 == 1);
    CHECK(dist.d_edge.at({"a", "c"}) == 0);
}

TEST_CASE("instance files round-trip and reject malformed input") {
    DagInstance inst = chain_instance();
    std::stringstream buf;
    write_instance(inst, buf);
    DagInstance back = parse_instance(buf);
    CHECK(back.offline_nodes.size() == 1);
    CHECK(back.impression_types.size() == 1);
    CHECK(back.sink == "t");

    std::stringstream bad("nodes\nv 1\nsink t\nwhatkey\nv t\n");
    try {
        parse_instance(bad);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("reduction is the identity on already-layered instances") {
    Rng rng(7);
    LayeredGenParams params;
    params.depth = 2;
    DagInstance inst = random_layered_instance(params, rng);
    auto dist = longest_distances(inst);
    auto layered = reduce_to_layered(inst, dist);
    CHECK(layered.d == 2);
    for (const auto& [origin, chain] : layered.copy_chains) {
        CHECK(chain.size() == 1);  // no virtual copies of offline nodes
        CHECK(layered.nodes[chain.front()].is_real);
    }
}

TEST_CASE("a skip edge forces a virtual copy with unbounded capacity") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"u", Rational(1)});
    inst.offline_nodes.push_back({"w", Rational(1)});
    inst.offline_nodes.push_back({"v", Rational(2)});
    inst.edges.emplace_back("u", "v");  // skips a layer: d_u = 2, d_v = 4
    inst.edges.emplace_back("u", "w");
    inst.edges.emplace_back("w", "v");
    inst.edges.emplace_back("w", "t");
    inst.edges.emplace_back("v", "t");
    inst.impression_types.push_back({"i", {"u"}, Rational(1)});
    // lengthen v: another path through w2
    inst.offline_nodes.push_back({"w2", Rational(1)});
    inst.edges.emplace_back("w", "w2");
    inst.edges.emplace_back("w2", "v");
    inst.edges.emplace_back("w2", "t");

    auto dist = longest_distances(inst);
    CHECK(dist.at("u") == 2);
    CHECK(dist.at("w") == 3);
    CHECK(dist.at("w2") == 4);
    CHECK(dist.at("v") == 5);
    CHECK(dist.d_edge.at({"u", "v"}) == 2);

    auto layered = reduce_to_layered(inst, dist);
    const auto& chain = layered.copy_chains.at("v");
    CHECK(chain.size() == 3);  // copies in layers 2,3,4
    CHECK(layered.nodes[chain[0]].layer == 2);
    CHECK_FALSE(layered.nodes[chain[0]].is_real);
    CHECK(layered.nodes[chain[0]].unbounded);
    CHECK(layered.nodes[chain[2]].layer == 4);
    CHECK(layered.nodes[chain[2]].is_real);
    CHECK(layered.nodes[chain[2]].capacity == Rational(2));
}

TEST_CASE("real copies sit in the layer their distance dictates") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        DagGenParams params;
        params.nodes = 6;
        DagInstance inst = random_dag_instance(params, rng);
        auto dist = longest_distances(inst);
        auto layered = reduce_to_layered(inst, dist);
        for (const auto& [origin, chain] : layered.copy_chains) {
            const auto& real = layered.nodes[chain.back()];
            CHECK(real.is_real);
            CHECK(real.layer == dist.at(origin) - 1);
        }
    }
}

TEST_CASE("reduction preserves the exact max-flow value") {
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        DagGenParams params;
        params.nodes = 6;
        DagInstance inst = random_dag_instance(params, rng);
        auto dist = longest_distances(inst);
        auto layered = reduce_to_layered(inst, dist);
        if (layered.d == 0) continue;

        auto original = max_flow_oracle(inst);
        auto reduced = max_flow_oracle(layered_as_instance(layered, inst.total_count()));
        CHECK(original.opt_value == reduced.opt_value);
    }
}

TEST_CASE("oracle: supply bottleneck") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"v", Rational(5)});
    inst.edges.emplace_back("v", "t");
    inst.impression_types.push_back({"i", {"v"}, Rational(3)});
    CHECK(max_flow_oracle(inst).opt_value == Rational(3));
}

TEST_CASE("oracle: capacity bottleneck with two impressions") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"v", Rational(1)});
    inst.edges.emplace_back("v", "t");
    inst.impression_types.push_back({"i1", {"v"}, Rational(1)});
    inst.impression_types.push_back({"i2", {"v"}, Rational(1)});
    CHECK(max_flow_oracle(inst).opt_value == Rational(1));
}

TEST_CASE("oracle handles rational capacities exactly") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"v", Rational(3, 2)});
    inst.offline_nodes.push_back({"w", Rational(1, 3)});
    inst.edges.emplace_back("v", "t");
    inst.edges.emplace_back("w", "t");
    inst.impression_types.push_back({"i", {"v", "w"}, Rational(7, 2)});
    CHECK(max_flow_oracle(inst).opt_value == Rational(3, 2) + Rational(1, 3));
}

TEST_CASE("oracle output satisfies conservation and capacity") {
    Rng rng(3);
    for (int trial = 0; trial < 15; ++trial) {
        DagGenParams params;
        params.nodes = 7;
        DagInstance inst = random_dag_instance(params, rng);
        auto result = max_flow_oracle(inst);
        for (const auto& node : inst.offline_nodes) {
            const Rational& flow = result.per_node_flow.at(node.id);
            CHECK(flow >= Rational(0));
            CHECK(flow <= node.capacity);
        }
        CHECK(result.opt_value <= inst.total_count());
    }
}

TEST_CASE("zero-capacity nodes are legal and carry no flow") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"v", Rational(0)});
    inst.offline_nodes.push_back({"w", Rational(2)});
    inst.edges.emplace_back("v", "t");
    inst.edges.emplace_back("w", "t");
    inst.impression_types.push_back({"i", {"v", "w"}, Rational(3)});
    auto result = max_flow_oracle(inst);
    CHECK(result.opt_value == Rational(2));
    CHECK(result.per_node_flow.at("v") == Rational(0));
}

TEST_CASE("longest distances ignore node listing order") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"b", Rational(1)});
    inst.offline_nodes.push_back({"a", Rational(1)});
    inst.edges.emplace_back("a", "b");
    inst.edges.emplace_back("b", "t");
    inst.edges.emplace_back("a", "t");
    inst.impression_types.push_back({"i", {"a"}, Rational(1)});
    auto d1 = longest_distances(inst);

    std::swap(inst.offline_nodes[0], inst.offline_nodes[1]);
    std::reverse(inst.edges.begin(), inst.edges.end());
    auto d2 = longest_distances(inst);
    CHECK(d1.d == d2.d);
}
