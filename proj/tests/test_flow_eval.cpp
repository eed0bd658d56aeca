#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_support.hpp"
#include "propflow/distances.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/generators.hpp"
#include "propflow/max_flow.hpp"
#include "propflow/weights.hpp"

using namespace propflow;

namespace {

// full pipeline: reduce, run weights, transfer
struct Pipeline {
    DistanceMap dist;
    LayeredGraph layered;
    WeightState state;
    DagWeights weights;
};

Pipeline run_pipeline(const DagInstance& inst, double eps, long long T = 0) {
    Pipeline p;
    p.dist = longest_distances(inst);
    p.layered = reduce_to_layered(inst, p.dist);
    auto schedule = make_schedule(p.layered.d, static_cast<int>(p.layered.max_layer_size), eps);
    WeightRunOptions opts;
    opts.max_iterations = T;
    p.state = d_layer_weights(p.layered, schedule, opts);
    p.weights = transfer_to_dag(p.state, p.layered, p.dist);
    return p;
}

}  // namespace

TEST_CASE("equal weights split an impression evenly") {
    LayeredGraph g;
    g.sink_id = "t";
    g.d = 1;
    g.nodes = {{"a", 1, true, false, Rational(1)}, {"b", 1, true, false, Rational(1)}};
    g.out = {{}, {}};
    g.types = {{"i", 1.0, Rational(1), {0, 1}}};
    g.rebuild_indexes();

    WeightState state;
    state.schedule = flat_schedule(0.2);
    state.decrements = {0, 0};
    state.max_iterations = 1;
    auto report = route_layered(g, state);
    CHECK(report.alloc.at("a~1") == doctest::Approx(0.5));
    CHECK(report.alloc.at("b~1") == doctest::Approx(0.5));
    CHECK(report.value == doctest::Approx(1.0));
}

TEST_CASE("a level gap past the threshold starves the low-weight neighbor") {
    LayeredGraph g;
    g.sink_id = "t";
    g.d = 1;
    g.nodes = {{"hi", 1, true, false, Rational(1)}, {"lo", 1, true, false, Rational(1)}};
    g.out = {{}, {}};
    g.types = {{"i", 1.0, Rational(1), {0, 1}}};
    g.rebuild_indexes();

    const double eps = 0.1;
    WeightState state;
    state.schedule = flat_schedule(eps);
    double n = static_cast<double>(g.max_layer_size);
    double threshold = std::log(n / eps) / eps;
    // past the threshold by the log1p/eps correction, so the weight ratio
    // provably clears n/eps_max
    int gap = static_cast<int>(std::ceil(threshold * (1.0 + eps))) + 1;
    state.decrements = {0, gap};
    state.max_iterations = gap;
    auto report = route_layered(g, state);
    double hi = report.alloc.at("hi~1");
    double lo = report.alloc.at("lo~1");
    CHECK(lo <= (eps / n) * hi);
}

TEST_CASE("an impression with no neighbors contributes nothing") {
    LayeredGraph g;
    g.sink_id = "t";
    g.d = 1;
    g.nodes = {{"a", 1, true, false, Rational(5)}};
    g.out = {{}};
    g.types = {{"orphan", 3.0, Rational(3), {}}, {"i", 1.0, Rational(1), {0}}};
    g.rebuild_indexes();
    WeightState state;
    state.schedule = flat_schedule(0.2);
    state.decrements = {0};
    state.max_iterations = 1;
    auto report = route_layered(g, state);
    CHECK(report.value == doctest::Approx(1.0));
}

TEST_CASE("dense reference: symmetric split and the empty-impression case") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"a", Rational(1, 2)});
    inst.offline_nodes.push_back({"b", Rational(1, 2)});
    inst.edges.emplace_back("a", "t");
    inst.edges.emplace_back("b", "t");
    inst.impression_types.push_back({"i", {"a", "b"}, Rational(1)});
    std::map<std::string, double> equal = {{"a", 1.0}, {"b", 1.0}};
    CHECK(oracle::dense_route_reference(inst, equal) == doctest::Approx(1.0));

    DagInstance empty = inst;
    empty.impression_types.clear();
    CHECK(oracle::dense_route_reference(empty, equal) == 0.0);
}

TEST_CASE("route_layered agrees with the dense reference on random instances") {
    Rng rng(101);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        LayeredGenParams params;
        params.depth = 1 + static_cast<int>(rng.next_index(2));
        params.max_per_layer = 4;
        DagInstance inst = random_layered_instance(params, rng);
        auto dist = longest_distances(inst);
        auto layered = reduce_to_layered(inst, dist);
        if (layered.d == 0) continue;
        auto schedule = make_schedule(layered.d, static_cast<int>(layered.max_layer_size), 0.25);
        WeightRunOptions opts;
        opts.max_iterations = 60;
        auto state = d_layer_weights(layered, schedule, opts);
        double value = route_layered(layered, state).value;

        std::map<std::string, double> weight_map;
        for (const auto& [origin, chain] : layered.copy_chains) {
            std::size_t real = chain.back();
            weight_map[origin] =
                std::pow(1.0 + schedule.at(layered.nodes[real].layer),
                         -static_cast<double>(state.decrements[real]));
        }
        double reference = oracle::dense_route_reference(inst, weight_map);
        auto cmp = oracle::compare(reference, value, 1e-12, 1e-9);
        CHECK(cmp.pass);
        ++compared;
    }
    CHECK(compared >= 150);
}

TEST_CASE("route_dag on an already-layered instance equals route_layered") {
    Rng rng(111);
    LayeredGenParams params;
    params.depth = 2;
    DagInstance inst = random_layered_instance(params, rng);
    auto p = run_pipeline(inst, 0.25, 200);
    double layered_value = route_layered(p.layered, p.state).value;
    double direct_value = route_dag(inst, p.weights, p.dist).value;
    CHECK(direct_value == doctest::Approx(layered_value).epsilon(1e-12));
}

TEST_CASE("a skip edge uses exponent weight_log over 2n") {
    // u -> v skips one layer; with plain exponent weights the fraction out
    // of u follows weight^(1/(2n)) on the skipping edge
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"u", Rational(1)});
    inst.offline_nodes.push_back({"w", Rational(1)});
    inst.offline_nodes.push_back({"v", Rational(1)});
    inst.edges.emplace_back("u", "v");
    inst.edges.emplace_back("u", "w");
    inst.edges.emplace_back("w", "v");
    inst.edges.emplace_back("v", "t");
    inst.edges.emplace_back("w", "t");
    inst.impression_types.push_back({"i", {"u"}, Rational(1)});
    auto dist = longest_distances(inst);
    REQUIRE(dist.d_edge.at({"u", "v"}) == 1);

    DagWeights w;  // external weights: no schedule, the idealized formula applies
    w.rho_base = 6.0;  // 2n with n = 3
    w.weight_log["u"] = 0.0;
    w.weight_log["w"] = std::log(0.5);
    w.weight_log["v"] = std::log(0.25);
    w.weight_log["t"] = 0.0;

    auto report = route_dag(inst, w, dist);
    // direct share of the impression's unit out of u
    double lv = std::exp(w.weight_log["v"] / 6.0);
    double lw = 0.5;
    double direct_share = lv / (lv + lw);
    double through_w = report.alloc.at("w") * 0.25 / (0.25 + 1.0);
    CHECK(report.alloc.at("v") == doctest::Approx(direct_share + through_w));
}

TEST_CASE("direct and layered modes agree on random reducible DAGs") {
    Rng rng(121);
    int compared = 0;
    for (int trial = 0; trial < 40; ++trial) {
        DagGenParams params;
        params.nodes = 7;
        DagInstance inst = random_dag_instance(params, rng);
        auto dist = longest_distances(inst);
        auto layered = reduce_to_layered(inst, dist);
        if (layered.d == 0) continue;
        auto p = run_pipeline(inst, 0.25, 300);
        double layered_value = route_layered(p.layered, p.state).value;
        double direct_value = route_dag(inst, p.weights, p.dist).value;
        auto cmp = oracle::compare(layered_value, direct_value, 1e-12, 1e-9);
        CHECK(cmp.pass);
        ++compared;
    }
    CHECK(compared >= 30);
}

TEST_CASE("adding a constant to every weight log changes nothing") {
    // scale freedom is a property of proportional fractions within one
    // layer; on a gapped edge the exponent re-scales the shift, so the
    // invariant is checked where it is meaningful: adjacent-layer routing
    Rng rng(131);
    LayeredGenParams params;
    params.depth = 2;
    params.max_per_layer = 3;
    DagInstance inst = random_layered_instance(params, rng);
    auto p = run_pipeline(inst, 0.25, 200);

    auto shifted = p.weights;
    for (auto& [id, lg] : shifted.weight_log) lg += 3.75;
    auto base = route_dag(inst, p.weights, p.dist);
    auto moved = route_dag(inst, shifted, p.dist);
    CHECK(std::abs(base.value - moved.value) <= 1e-12 * std::max(1.0, base.value));
    for (const auto& [id, alloc] : base.alloc) {
        CHECK(std::abs(alloc - moved.alloc.at(id)) <= 1e-12 * std::max(1.0, alloc));
    }

    // same check through the layered forward pass with raw log weights
    auto lw = layered_log_weights(p.layered, p.state);
    std::vector<double> counts(p.layered.types.size());
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = p.layered.types[i].count;
    auto alloc_base = layered_forward_alloc(p.layered, lw, counts);
    for (double& v : lw) v -= 11.25;
    auto alloc_moved = layered_forward_alloc(p.layered, lw, counts);
    for (std::size_t v = 0; v < alloc_base.size(); ++v) {
        CHECK(std::abs(alloc_base[v] - alloc_moved[v]) <= 1e-12 * std::max(1.0, alloc_base[v]));
    }
}

TEST_CASE("raising one capacity never lowers the value") {
    Rng rng(141);
    for (int trial = 0; trial < 5; ++trial) {
        LayeredGenParams params;
        params.depth = 2;
        params.max_per_layer = 3;
        DagInstance inst = random_layered_instance(params, rng);
        auto p = run_pipeline(inst, 0.25, 150);
        double base_value = route_dag(inst, p.weights, p.dist).value;
        for (std::size_t i = 0; i < inst.offline_nodes.size(); ++i) {
            DagInstance bumped = inst;
            bumped.offline_nodes[i].capacity = bumped.offline_nodes[i].capacity + Rational(1);
            double bumped_value = route_dag(bumped, p.weights, p.dist).value;
            CHECK(bumped_value >= base_value - 1e-9);
        }
    }
}

TEST_CASE("routing never beats the exact oracle") {
    Rng rng(151);
    for (int trial = 0; trial < 20; ++trial) {
        DagGenParams params;
        params.nodes = 6;
        DagInstance inst = random_dag_instance(params, rng);
        auto layered_dist = longest_distances(inst);
        if (reduce_to_layered(inst, layered_dist).d == 0) continue;
        auto p = run_pipeline(inst, 0.25, 150);
        double value = route_dag(inst, p.weights, p.dist).value;
        double opt = max_flow_oracle(inst).opt_value.to_double();
        CHECK(value <= opt + 1e-6);
    }
}
