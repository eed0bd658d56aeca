#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracle_support.hpp"
#include "propflow/distances.hpp"
#include "propflow/errors.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/generators.hpp"
#include "propflow/max_flow.hpp"
#include "propflow/online.hpp"
#include "propflow/weights.hpp"

using namespace propflow;

namespace {

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

ArrivalTrace integral_trace(const DagInstance& inst, Rng& rng) {
    ArrivalTrace trace;
    for (const auto& t : inst.impression_types) {
        for (std::int64_t k = 0; k < t.count.num() / t.count.den(); ++k) {
            trace.arrivals.push_back(t.id);
        }
    }
    rng.shuffle(trace.arrivals);
    return trace;
}

std::map<std::string, double> offline_logs(const DagWeights& w, const DagInstance& inst) {
    std::map<std::string, double> out;
    for (const auto& node : inst.offline_nodes) out[node.id] = w.log_of(node.id);
    return out;
}

DagWeights all_ones_weights(const DagInstance& inst) {
    DagWeights w;
    w.rho_base = 2.0 * static_cast<double>(inst.offline_nodes.size());
    for (const auto& node : inst.offline_nodes) w.weight_log[node.id] = 0.0;
    w.weight_log[inst.sink] = 0.0;
    return w;
}

}  // namespace

TEST_CASE("parameter error: identity, scaling, and a concrete gap") {
    std::map<std::string, double> a = {{"x", 0.0}, {"y", -1.0}};
    std::map<std::string, double> b = {{"x", 0.0}, {"y", -3.0}};
    CHECK(parameter_error(a, a).eta == doctest::Approx(1.0));

    auto scaled = a;
    for (auto& [id, lg] : scaled) lg += std::log(7.5);
    CHECK(parameter_error(scaled, a).eta == doctest::Approx(1.0));

    CHECK(parameter_error(a, b).eta == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("direct simulation matches the recurrence at the realized counts") {
    Rng rng(201);
    DagGenParams params;
    params.nodes = 6;
    params.max_count = 4;
    DagInstance inst = random_dag_instance(params, rng);
    auto p = run_pipeline(inst, 0.25, 200);
    ArrivalTrace trace = integral_trace(inst, rng);

    auto sim = simulate_direct(inst, p.weights, p.dist, trace);
    double recurrence = route_dag(realized_instance(inst, trace), p.weights, p.dist).value;
    CHECK(sim.value == doctest::Approx(recurrence).epsilon(1e-12));
    CHECK(sim.state.value ==
          doctest::Approx(std::accumulate(sim.state.gamma.begin(), sim.state.gamma.end(), 0.0)));
}

TEST_CASE("maximal dominates direct and the 1/(d+1) floor on random instances") {
    Rng rng(211);
    int tested = 0;
    for (int trial = 0; trial < 20; ++trial) {
        DagGenParams params;
        params.nodes = 6;
        params.max_count = 4;
        DagInstance inst = random_dag_instance(params, rng);
        auto layered = reduce_to_layered(inst, longest_distances(inst));
        if (layered.d == 0) continue;
        auto p = run_pipeline(inst, 0.25, 200);
        ArrivalTrace trace = integral_trace(inst, rng);
        if (trace.arrivals.empty()) continue;

        auto direct = simulate_direct(inst, p.weights, p.dist, trace);
        auto maximal = simulate_maximal(inst, p.weights, p.dist, trace);
        CHECK(maximal.value >= direct.value - 1e-9);

        double opt = max_flow_oracle(realized_instance(inst, trace)).opt_value.to_double();
        int d = p.dist.offline_depth();
        CHECK(maximal.value >= opt / (d + 1) - 1e-9);
        CHECK(maximal.value <= opt + 1e-6);

        // feasibility and maximality
        for (const auto& [id, res] : maximal.state.residual) CHECK(res >= -1e-12);
        for (std::size_t i = 0; i < trace.arrivals.size(); ++i) {
            if (maximal.state.gamma[i] < 1.0 - 1e-9) {
                CHECK_FALSE(
                    has_residual_path(inst, maximal.state.residual, trace.arrivals[i]));
            }
        }
        ++tested;
    }
    CHECK(tested >= 10);
}

TEST_CASE("worst-case DAG: greedy hits exactly 1/(d+1)") {
    for (int d = 1; d <= 3; ++d) {
        WorstCaseDag wc = gen_worstcase_dag(d);
        DagWeights ones = all_ones_weights(wc.instance);
        auto dist = longest_distances(wc.instance);
        auto run = run_with_adversary(Policy::Greedy, wc.instance, ones, dist,
                                      worstcase_adversary(wc));
        CHECK(run.result.value == doctest::Approx(1.0));
        CHECK(static_cast<int>(run.trace.arrivals.size()) == d + 1);

        double opt =
            max_flow_oracle(realized_instance(wc.instance, run.trace)).opt_value.to_double();
        CHECK(opt == doctest::Approx(d + 1));

        // fractional maximal on the same trace clears the floor
        auto maximal = simulate_maximal(wc.instance, ones, dist, run.trace);
        CHECK(maximal.value >= opt / (d + 1) - 1e-9);
        auto direct = simulate_direct(wc.instance, ones, dist, run.trace);
        CHECK(maximal.value >= direct.value - 1e-9);
    }
}

TEST_CASE("lower-bound generator: planted weights and the online ceiling") {
    const double eps = 0.1;
    auto lb = gen_bipartite_lowerbound(10, 5, eps, 1234);
    CHECK(lb.p == doctest::Approx(0.5));
    CHECK(lb.planted_eta == doctest::Approx(0.5 / eps));
    // the permutation's first five advertisers carry w1 = p/eps = 5
    int heavy = 0;
    for (const auto& node : lb.instance.offline_nodes) {
        double w = std::exp(lb.planted_weights.weight_log.at(node.id));
        if (w > 1.0) {
            CHECK(w == doctest::Approx(5.0));
            ++heavy;
        }
    }
    CHECK(heavy == 5);

    auto dist = longest_distances(lb.instance);
    double opt = max_flow_oracle(realized_instance(lb.instance, lb.trace)).opt_value.to_double();
    CHECK(opt == doctest::Approx(10.0));  // a perfect matching always exists

    double planted_value = simulate_direct(lb.instance, lb.planted_weights, dist, lb.trace).value;
    CHECK(planted_value >= (1.0 - eps) * opt - 1e-9);

    // averaged over seeds, all-ones predictions cannot beat 1 - p(1-p)
    const int seeds = 200;
    double sum_direct = 0, sum_maximal = 0, sumsq_direct = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        auto inst = gen_bipartite_lowerbound(10, 5, eps, 9000 + seed);
        auto d2 = longest_distances(inst.instance);
        DagWeights ones = all_ones_weights(inst.instance);
        double o = max_flow_oracle(realized_instance(inst.instance, inst.trace))
                       .opt_value.to_double();
        double rd = simulate_direct(inst.instance, ones, d2, inst.trace).value / o;
        double rm = simulate_maximal(inst.instance, ones, d2, inst.trace).value / o;
        sum_direct += rd;
        sumsq_direct += rd * rd;
        sum_maximal += rm;
    }
    double mean_direct = sum_direct / seeds;
    double mean_maximal = sum_maximal / seeds;
    double var = std::max(0.0, (sumsq_direct - seeds * mean_direct * mean_direct) / (seeds - 1));
    double stderr_direct = std::sqrt(var / seeds);
    double ceiling = 1.0 - lb.p * (1.0 - lb.p);
    CHECK(mean_direct <= ceiling + 3 * stderr_direct + 1e-9);
    CHECK(mean_maximal <= ceiling + 3 * stderr_direct + 1e-9);
}

TEST_CASE("parameter robustness of direct routing on 2-offline-layer instances") {
    Rng rng(221);
    int tested = 0;
    for (int trial = 0; trial < 12 && tested < 6; ++trial) {
        LayeredGenParams params;
        params.depth = 2;
        params.max_per_layer = 3;
        params.types = 3;
        params.max_count = 5;
        DagInstance inst = random_layered_instance(params, rng);
        auto layered = reduce_to_layered(inst, longest_distances(inst));
        if (layered.d != 2) continue;
        auto p = run_pipeline(inst, 0.2, 400);
        ArrivalTrace trace = integral_trace(inst, rng);
        if (trace.arrivals.empty()) continue;

        double opt = max_flow_oracle(inst).opt_value.to_double();
        if (opt <= 0) continue;
        double base_ratio = route_dag(inst, p.weights, p.dist).value / opt;

        // with its own weights, direct simulation clears the offline bound;
        // 0.9 frozen from a calibration pass over these seeds (worst 0.9499)
        auto own = simulate_direct(inst, p.weights, p.dist, trace);
        CHECK(own.value >= (1.0 - 5 * 0.2) * opt - 1e-9);
        CHECK(own.value >= 0.9 * opt);

        for (double eta0 : {1.0, 1.5, 2.0}) {
            DagWeights perturbed = p.weights;
            for (auto& [id, lg] : perturbed.weight_log) {
                if (id == inst.sink) continue;
                lg += rng.next_real(-std::log(eta0), std::log(eta0));
            }
            double eta = parameter_error(offline_logs(perturbed, inst), offline_logs(p.weights, inst)).eta;
            CHECK(eta <= eta0 * eta0 + 1e-9);

            auto direct = simulate_direct(inst, perturbed, p.dist, trace);
            auto maximal = simulate_maximal(inst, perturbed, p.dist, trace);
            double floor = base_ratio / std::pow(eta, 4) * opt;
            CHECK(direct.value >= floor - 1e-9);
            CHECK(maximal.value >= opt / 3.0 - 1e-9);
            CHECK(maximal.value >= direct.value - 1e-9);
        }
        ++tested;
    }
    CHECK(tested >= 3);
}

TEST_CASE("adaptive bipartite: exact weights never decrement and hit OPT") {
    DagInstance inst;
    inst.sink = "t";
    for (int i = 1; i <= 2; ++i) {
        inst.offline_nodes.push_back({"a" + std::to_string(i), Rational(5)});
        inst.edges.emplace_back("a" + std::to_string(i), "t");
    }
    inst.impression_types.push_back({"both", {"a1", "a2"}, Rational(8)});
    ArrivalTrace trace;
    for (int k = 0; k < 8; ++k) trace.arrivals.push_back("both");

    std::map<std::string, double> exact = {{"a1", 0.0}, {"a2", 0.0}};
    auto result = simulate_adaptive_bipartite(inst, exact, 0.1, trace);
    CHECK(result.decrement_count == 0);
    CHECK(result.value == doctest::Approx(8.0));
    CHECK(result.state.value ==
          doctest::Approx(std::accumulate(result.state.gamma.begin(), result.state.gamma.end(), 0.0)));
}

TEST_CASE("adaptive bipartite: allocation and value bounds under perturbed weights") {
    const double eps = 0.1;
    Rng rng(231);
    int tested = 0;
    for (int trial = 0; trial < 30 && tested < 10; ++trial) {
        BipartiteGenParams params;
        params.advertisers = 3;
        params.types = 3;
        params.max_capacity = 8;
        params.max_count = 6;
        DagInstance inst = random_bipartite_instance(params, rng);

        double total = inst.total_count().to_double();
        double opt = max_flow_oracle(inst).opt_value.to_double();
        if (total <= 0 || opt < total - 1e-9) continue;  // OPT must assign everything

        auto view = bipartite_view(inst);
        auto state = bipartite_weights(view, eps);
        std::map<std::string, double> reference;
        bool saturated = false;
        for (std::size_t a = 0; a < view.ids.size(); ++a) {
            reference[view.ids[a]] = -state.decrements[a] * std::log1p(eps);
        }
        // reference weights must themselves stay under (1+eps) C
        {
            DagInstance probe = inst;
            auto d2 = longest_distances(probe);
            DagWeights w;
            w.rho_base = 2.0 * view.ids.size();
            w.weight_log = reference;
            w.weight_log["t"] = 0.0;
            auto rep = route_dag(probe, w, d2);
            for (std::size_t a = 0; a < view.ids.size(); ++a) {
                if (rep.alloc.at(view.ids[a]) > (1.0 + eps) * view.capacity[a]) saturated = true;
            }
        }
        if (saturated) continue;

        std::map<std::string, double> predicted = reference;
        for (auto& [id, lg] : predicted) lg += rng.next_real(-std::log(1.5), std::log(1.5));
        double eta = parameter_error(predicted, reference).eta;

        ArrivalTrace trace = integral_trace(inst, rng);
        auto result = simulate_adaptive_bipartite(inst, predicted, eps, trace);

        double log_eta = std::log(eta) / std::log1p(eps);
        for (std::size_t a = 0; a < view.ids.size(); ++a) {
            double cap = view.capacity[a];
            CHECK(result.alloc.at(view.ids[a]) <= (1.0 + 3 * eps + 4 * eps * log_eta) * cap + 1e-6);
        }
        CHECK(result.value >= (1.0 - 4 * eps * log_eta - 3 * eps) * opt - 1e-6);
        ++tested;
    }
    CHECK(tested >= 5);
}

TEST_CASE("adaptive bipartite aborts on unassignable overload") {
    DagInstance inst;
    inst.sink = "t";
    inst.offline_nodes.push_back({"a", Rational(1)});
    inst.edges.emplace_back("a", "t");
    inst.impression_types.push_back({"pin", {"a"}, Rational(5)});
    ArrivalTrace trace;
    for (int k = 0; k < 5; ++k) trace.arrivals.push_back("pin");

    std::map<std::string, double> predicted = {{"a", 0.0}};
    AdaptiveOptions options;
    options.eta_bound = 10.0;
    try {
        simulate_adaptive_bipartite(inst, predicted, 0.1, trace, options);
        FAIL("expected NonTermination");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonTermination);
    }
}

TEST_CASE("trace files round-trip") {
    ArrivalTrace t;
    t.arrivals = {"x", "y", "x"};
    std::stringstream buf;
    save_trace(t, buf);
    auto back = load_trace(buf);
    CHECK(back.arrivals == t.arrivals);
}
