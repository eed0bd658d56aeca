// propflow: weight computation, evaluation, online simulation, learning and
// robustness sweeps for proportional flow allocation and restricted
// assignment. See the README for file formats.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "propflow/csv.hpp"
#include "propflow/distances.hpp"
#include "propflow/errors.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/generators.hpp"
#include "propflow/learning.hpp"
#include "propflow/load_balancing.hpp"
#include "propflow/log.hpp"
#include "propflow/max_flow.hpp"
#include "propflow/online.hpp"
#include "propflow/rng.hpp"
#include "propflow/weights.hpp"

using namespace propflow;

namespace {

constexpr int kExitError = 1;
constexpr int kExitBadFile = 2;
constexpr int kExitAssumption = 3;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return in;
}

std::string provenance(std::uint64_t seed) {
    return "# rng=" + std::string(Rng::kName) + " seed=" + std::to_string(seed);
}

struct PipelineResult {
    DistanceMap dist;
    LayeredGraph layered;
    WeightState state;
    DagWeights weights;
};

PipelineResult weight_pipeline(const DagInstance& inst, double eps, long long max_iters) {
    PipelineResult p;
    p.dist = longest_distances(inst);
    p.layered = reduce_to_layered(inst, p.dist);
    if (p.layered.d == 0) {
        throw Error(ErrorKind::InvalidArgument, "no impression reaches any offline node");
    }
    auto schedule = make_schedule(p.layered.d, static_cast<int>(p.layered.max_layer_size), eps);
    WeightRunOptions opts;
    opts.max_iterations = max_iters;
    p.state = d_layer_weights(p.layered, schedule, opts);
    p.weights = transfer_to_dag(p.state, p.layered, p.dist);
    return p;
}

std::map<std::string, double> offline_logs(const DagWeights& w, const DagInstance& inst) {
    std::map<std::string, double> out;
    for (const auto& node : inst.offline_nodes) out[node.id] = w.log_of(node.id);
    return out;
}

DagWeights all_ones(const DagInstance& inst) {
    DagWeights w;
    w.rho_base = 2.0 * static_cast<double>(inst.offline_nodes.size());
    for (const auto& node : inst.offline_nodes) w.weight_log[node.id] = 0.0;
    w.weight_log[inst.sink] = 0.0;
    return w;
}

// ---- gen ----

struct GenConfig {
    std::string kind;
    std::uint64_t seed = 1;
    std::string out;
    std::string trace_out;
    std::string weights_out;
    std::string instance;
    int advertisers = 4, types = 4, depth = 3, width = 4, nodes = 6;
    int machines = 3, jobs = 10;
    int n = 10, s = 5, d = 3, m = 50;
    std::int64_t max_count = 20, max_size = 5, max_capacity = 6, min_capacity = 1;
    double epsilon = 0.1;
};

int run_gen(const GenConfig& cfg) {
    Rng rng(cfg.seed);
    if (cfg.kind == "bipartite") {
        BipartiteGenParams p{cfg.advertisers, cfg.types, cfg.max_capacity, cfg.max_count,
                             cfg.min_capacity};
        auto out = open_out(cfg.out);
        out << "# propflow gen bipartite\n" << provenance(cfg.seed) << "\n";
        write_instance(random_bipartite_instance(p, rng), out);
    } else if (cfg.kind == "layered") {
        LayeredGenParams p;
        p.depth = cfg.depth;
        p.max_per_layer = cfg.width;
        p.types = cfg.types;
        p.max_capacity = cfg.max_capacity;
        p.max_count = cfg.max_count;
        p.min_capacity = cfg.min_capacity;
        auto out = open_out(cfg.out);
        out << "# propflow gen layered\n" << provenance(cfg.seed) << "\n";
        write_instance(random_layered_instance(p, rng), out);
    } else if (cfg.kind == "dag") {
        DagGenParams p;
        p.nodes = cfg.nodes;
        p.types = cfg.types;
        p.max_capacity = cfg.max_capacity;
        p.max_count = cfg.max_count;
        auto out = open_out(cfg.out);
        out << "# propflow gen dag\n" << provenance(cfg.seed) << "\n";
        write_instance(random_dag_instance(p, rng), out);
    } else if (cfg.kind == "schedule") {
        ScheduleGenParams p{cfg.machines, cfg.jobs, cfg.max_size};
        auto out = open_out(cfg.out);
        out << "# propflow gen schedule\n" << provenance(cfg.seed) << "\n";
        write_schedule(random_schedule_instance(p, rng), out);
    } else if (cfg.kind == "lowerbound") {
        auto lb = gen_bipartite_lowerbound(cfg.n, cfg.s, cfg.epsilon, cfg.seed);
        auto out = open_out(cfg.out);
        out << "# propflow gen lowerbound p=" << format_number(lb.p)
            << " planted_eta=" << format_number(lb.planted_eta) << "\n"
            << provenance(cfg.seed) << "\n";
        write_instance(lb.instance, out);
        if (!cfg.trace_out.empty()) {
            auto tout = open_out(cfg.trace_out);
            save_trace(lb.trace, tout);
        }
        if (!cfg.weights_out.empty()) {
            auto wout = open_out(cfg.weights_out);
            save_dag_weights(lb.planted_weights, wout);
        }
    } else if (cfg.kind == "worstcase") {
        auto wc = gen_worstcase_dag(cfg.d);
        auto out = open_out(cfg.out);
        out << "# propflow gen worstcase d=" << cfg.d << "\n";
        write_instance(wc.instance, out);
    } else if (cfg.kind == "distribution") {
        DagInstance skeleton = load_instance(cfg.instance);
        validate(skeleton);
        TypeDistribution dist;
        dist.kind = TypeDistribution::Kind::Iid;
        dist.m = cfg.m;
        double remaining = 1.0;
        for (std::size_t i = 0; i < skeleton.impression_types.size(); ++i) {
            bool last = i + 1 == skeleton.impression_types.size();
            double p = last ? remaining : remaining * rng.next_real(0.2, 0.8);
            dist.support.push_back({skeleton.impression_types[i].id, p});
            remaining -= p;
        }
        auto out = open_out(cfg.out);
        save_distribution(dist, out);
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown kind '" + cfg.kind + "'");
    }
    std::cout << "gen " << cfg.kind << " ok\n";
    return 0;
}

// ---- weights ----

int run_weights(const std::string& instance_path, double eps, long long max_iters,
                bool with_oracle, const std::string& out_path, const std::string& dag_out) {
    DagInstance inst = load_instance(instance_path);
    validate(inst);
    auto p = weight_pipeline(inst, eps, max_iters);
    double value = route_layered(p.layered, p.state).value;

    std::ostringstream line;
    line << "value=" << format_number(value);
    if (with_oracle) {
        double opt = max_flow_oracle(inst).opt_value.to_double();
        line << " opt=" << format_number(opt)
             << " ratio=" << format_number(opt > 0 ? value / opt : 1.0);
    }
    line << " iterations=" << p.state.iterations_run
         << " fixed_point=" << (p.state.fixed_point ? 1 : 0)
         << " drift=" << format_number(p.weights.max_chain_drift);

    if (!out_path.empty()) {
        auto out = open_out(out_path);
        save_weight_state(p.state, p.layered, out);
    }
    if (!dag_out.empty()) {
        auto out = open_out(dag_out);
        save_dag_weights(p.weights, out);
    }
    std::cout << line.str() << "\n";
    return 0;
}

// ---- eval ----

int run_eval(const std::string& instance_path, const std::string& weights_path,
             const std::string& out_path) {
    DagInstance inst = load_instance(instance_path);
    validate(inst);
    auto in = open_in(weights_path);
    DagWeights w = load_dag_weights(in);
    auto dist = longest_distances(inst);
    auto report = route_dag(inst, w, dist);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        out = &file;
    }
    CsvWriter csv(*out);
    csv.row({"node", "alloc", "truncated"});
    for (const auto& [id, alloc] : report.alloc) {
        csv.row({id, format_number(alloc), format_number(report.truncated.at(id))});
    }
    csv.row({"TOTAL", format_number(report.value), format_number(report.value)});
    return 0;
}

// ---- simulate ----

struct SimulateConfig {
    std::string instance;
    std::string weights;
    std::string trace;
    std::string adversary;
    std::string policy = "direct";
    std::string reference_weights;
    std::string reference_instance;
    std::string out;
    std::string trace_out;
    double epsilon = 0.1;
    std::uint64_t seed = 1;
};

int run_simulate(const SimulateConfig& cfg) {
    DagInstance inst;
    std::optional<WorstCaseDag> worstcase;
    if (!cfg.adversary.empty()) {
        auto colon = cfg.adversary.find(':');
        if (cfg.adversary.rfind("worstcase", 0) != 0 || colon == std::string::npos) {
            throw Error(ErrorKind::InvalidArgument,
                        "unknown adversary '" + cfg.adversary + "' (expected worstcase:<d>)");
        }
        worstcase = gen_worstcase_dag(std::stoi(cfg.adversary.substr(colon + 1)));
        inst = worstcase->instance;
    } else {
        inst = load_instance(cfg.instance);
    }
    validate(inst);
    auto dist = longest_distances(inst);

    DagWeights weights = all_ones(inst);
    if (!cfg.weights.empty()) {
        auto in = open_in(cfg.weights);
        weights = load_dag_weights(in);
    }

    ArrivalTrace trace;
    double value = 0;
    if (cfg.policy == "adaptive") {
        if (cfg.trace.empty()) {
            throw Error(ErrorKind::InvalidArgument, "the adaptive policy needs --trace");
        }
        auto tin = open_in(cfg.trace);
        trace = load_trace(tin);
        auto result =
            simulate_adaptive_bipartite(inst, offline_logs(weights, inst), cfg.epsilon, trace);
        value = result.value;
    } else {
        auto policy = parse_policy(cfg.policy);
        if (!policy) {
            throw Error(ErrorKind::InvalidArgument, "unknown policy '" + cfg.policy + "'");
        }
        if (worstcase) {
            auto run = run_with_adversary(*policy, inst, weights, dist,
                                          worstcase_adversary(*worstcase));
            trace = run.trace;
            value = run.result.value;
        } else {
            auto tin = open_in(cfg.trace);
            trace = load_trace(tin);
            value = simulate(*policy, inst, weights, dist, trace).value;
        }
    }

    DagInstance realized = realized_instance(inst, trace);
    double opt = max_flow_oracle(realized).opt_value.to_double();

    std::string eta = "";
    if (!cfg.reference_weights.empty()) {
        auto rin = open_in(cfg.reference_weights);
        DagWeights reference = load_dag_weights(rin);
        eta = format_number(
            parameter_error(offline_logs(weights, inst), offline_logs(reference, inst)).eta);
    }
    std::string gamma = "";
    if (!cfg.reference_instance.empty()) {
        DagInstance reference = load_instance(cfg.reference_instance);
        InstanceVector a, b;
        for (const auto& t : realized.impression_types) a.counts[t.id] = t.count;
        for (const auto& t : reference.impression_types) b.counts[t.id] = t.count;
        gamma = format_number(instance_distance(a, b));
    }

    if (!cfg.trace_out.empty()) {
        auto tout = open_out(cfg.trace_out);
        save_trace(trace, tout);
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!cfg.out.empty()) {
        file = open_out(cfg.out);
        out = &file;
    }
    CsvWriter csv(*out);
    csv.row({"policy", "seed", "value", "opt", "ratio", "eta", "gamma"});
    csv.row({cfg.policy, std::to_string(cfg.seed), format_number(value), format_number(opt),
             format_number(opt > 0 ? value / opt : 1.0), eta, gamma});
    return 0;
}

// ---- learn ----

int run_learn(const std::string& instance_path, const std::string& dist_path, int samples,
              double eps, std::uint64_t seed, int trials, long long max_iters,
              const std::string& out_path) {
    DagInstance skeleton = load_instance(instance_path);
    validate(skeleton);
    auto din = open_in(dist_path);
    TypeDistribution dist = load_distribution(din);
    dist.check(skeleton);

    // capacity floor of the learnability guarantee, constants at 1
    double floor = std::log(1.0 / eps) / (eps * eps);
    for (const auto& node : skeleton.offline_nodes) {
        if (node.capacity.to_double() < floor) {
            std::cerr << "assumption violated: capacity of '" << node.id << "' is "
                      << node.capacity.str() << ", below the learnability floor "
                      << format_number(floor) << "\n";
            return kExitAssumption;
        }
    }

    Rng rng(seed);
    std::vector<InstanceVector> sample_vectors;
    for (int i = 0; i < samples; ++i) {
        sample_vectors.push_back(sample_instance(dist, rng.next_u64()).counts);
    }
    auto learned = learn_weights(sample_vectors, skeleton, eps, max_iters);

    // min-load floor applies beyond the bipartite case
    DagInstance averaged = with_counts(skeleton, learned.averaged.counts);
    auto dmap = longest_distances(averaged);
    if (dmap.offline_depth() >= 2) {
        auto oracle = max_flow_oracle(averaged);
        for (const auto& node : averaged.offline_nodes) {
            if (!dmap.reached(node.id)) continue;
            if (oracle.per_node_flow.at(node.id).to_double() < floor) {
                std::cerr << "assumption violated: optimal load of '" << node.id << "' is "
                          << format_number(oracle.per_node_flow.at(node.id).to_double())
                          << ", below the min-load floor " << format_number(floor) << "\n";
                return kExitAssumption;
            }
        }
    }

    if (!out_path.empty()) {
        auto out = open_out(out_path);
        save_dag_weights(learned.weights, out);
    }
    auto mc = estimate_expected_value(learned.weights, skeleton, dist, trials, rng.next_u64());
    std::cout << "samples=" << samples
              << " value_on_averaged=" << format_number(learned.value_on_averaged)
              << " mc_mean=" << format_number(mc.mean)
              << " mc_std_error=" << format_number(mc.std_error) << " trials=" << mc.trials
              << "\n";
    return 0;
}

// ---- lb ----

struct LbConfig {
    std::string mode = "weights";
    std::string schedule;
    std::string perturbed;
    std::vector<std::string> samples;
    std::string out;
    double epsilon = 0.25;
    std::uint64_t seed = 1;
    int sweep = 0;
};

int run_lb(const LbConfig& cfg) {
    if (cfg.mode == "weights") {
        ScheduleInstance inst = load_schedule(cfg.schedule);
        auto w = makespan_weights(inst, cfg.epsilon);
        double makespan = fractional_assign(inst, w).makespan;
        double opt = opt_makespan(inst);
        if (!cfg.out.empty()) {
            auto out = open_out(cfg.out);
            save_machine_weights(w, out);
        }
        std::cout << "makespan=" << format_number(makespan) << " opt=" << format_number(opt)
                  << " ratio=" << format_number(opt > 0 ? makespan / opt : 1.0) << "\n";
        return 0;
    }
    if (cfg.mode == "robust") {
        ScheduleInstance base = load_schedule(cfg.schedule);
        auto w = makespan_weights(base, cfg.epsilon);
        std::vector<ScheduleInstance> perturbed;
        if (!cfg.perturbed.empty()) {
            perturbed.push_back(load_schedule(cfg.perturbed));
        } else {
            Rng rng(cfg.seed);
            for (int i = 0; i < std::max(cfg.sweep, 1); ++i) {
                ScheduleInstance p = base;
                for (auto& job : p.jobs) {
                    std::int64_t percent = 50 + rng.next_int(0, 100);
                    job.size = job.size * Rational(percent, 100);
                }
                perturbed.push_back(std::move(p));
            }
        }
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!cfg.out.empty()) {
            file = open_out(cfg.out);
            out = &file;
        }
        CsvWriter csv(*out);
        csv.row({"eta", "alg", "opt", "bound", "slack", "ok"});
        int bad = 0;
        for (const auto& p : perturbed) {
            auto report = lb_robustness_check(base, p, cfg.epsilon, w);
            if (!report.ok) ++bad;
            csv.row({format_number(report.eta), format_number(report.alg_on_perturbed),
                     format_number(report.opt_perturbed), format_number(report.bound),
                     format_number(report.slack), report.ok ? "1" : "0"});
        }
        return bad == 0 ? 0 : kExitError;
    }
    if (cfg.mode == "learn") {
        if (cfg.samples.empty()) {
            throw Error(ErrorKind::InvalidArgument, "--mode learn needs --sample files");
        }
        std::vector<ScheduleInstance> samples;
        for (const auto& path : cfg.samples) samples.push_back(load_schedule(path));
        auto w = learn_machine_weights(samples, cfg.epsilon);
        double alg_sum = 0, opt_sum = 0;
        for (const auto& s : samples) {
            alg_sum += fractional_assign(s, w).makespan;
            opt_sum += opt_makespan(s);
        }
        if (!cfg.out.empty()) {
            auto out = open_out(cfg.out);
            save_machine_weights(w, out);
        }
        std::cout << "samples=" << samples.size()
                  << " mean_alg=" << format_number(alg_sum / samples.size())
                  << " mean_opt=" << format_number(opt_sum / samples.size())
                  << " ratio=" << format_number(opt_sum > 0 ? alg_sum / opt_sum : 1.0) << "\n";
        return 0;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown lb mode '" + cfg.mode + "'");
}

// ---- sweep ----

int run_sweep(const std::string& instance_path, double eps, int perturbations,
              std::int64_t max_delta, std::uint64_t seed, long long max_iters,
              const std::string& out_path) {
    DagInstance base = load_instance(instance_path);
    validate(base);

    InstanceVector base_counts;
    for (const auto& t : base.impression_types) base_counts.counts[t.id] = t.count;

    Rng rng(seed);
    std::vector<InstanceVector> list;
    for (int i = 0; i < perturbations; ++i) {
        InstanceVector p = base_counts;
        for (auto& [id, c] : p.counts) {
            std::int64_t now = c.num() / c.den();
            std::int64_t delta = rng.next_int(-max_delta, max_delta);
            p.counts[id] = Rational(std::max<std::int64_t>(0, now + delta));
        }
        list.push_back(std::move(p));
    }
    auto report = robustness_sweep(base, list, eps, max_iters);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        out = &file;
    }
    CsvWriter csv(*out);
    csv.row({"gamma", "value_direct", "value_maximal", "opt", "bound", "ok"});
    for (const auto& row : report.rows) {
        csv.row({format_number(row.gamma), format_number(row.value_direct),
                 format_number(row.value_maximal), format_number(row.opt),
                 format_number(row.bound), row.ok ? "1" : "0"});
    }
    std::cout << "base_ratio=" << format_number(report.base_ratio)
              << " violations=" << report.violations << "\n";
    return report.violations == 0 ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proportional-weight flow allocation and restricted assignment"};
    app.require_subcommand(1);

    GenConfig gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate instances, traces and distributions");
    cmd_gen->add_option("--kind", gen.kind)->required();
    cmd_gen->add_option("--seed", gen.seed);
    cmd_gen->add_option("--out", gen.out)->required();
    cmd_gen->add_option("--trace-out", gen.trace_out);
    cmd_gen->add_option("--weights-out", gen.weights_out);
    cmd_gen->add_option("--instance", gen.instance);
    cmd_gen->add_option("--advertisers", gen.advertisers);
    cmd_gen->add_option("--types", gen.types);
    cmd_gen->add_option("--depth", gen.depth);
    cmd_gen->add_option("--width", gen.width);
    cmd_gen->add_option("--nodes", gen.nodes);
    cmd_gen->add_option("--machines", gen.machines);
    cmd_gen->add_option("--jobs", gen.jobs);
    cmd_gen->add_option("--n", gen.n);
    cmd_gen->add_option("--s", gen.s);
    cmd_gen->add_option("--d", gen.d);
    cmd_gen->add_option("--m", gen.m);
    cmd_gen->add_option("--max-count", gen.max_count);
    cmd_gen->add_option("--max-size", gen.max_size);
    cmd_gen->add_option("--max-capacity", gen.max_capacity);
    cmd_gen->add_option("--min-capacity", gen.min_capacity);
    cmd_gen->add_option("--epsilon", gen.epsilon);

    std::string w_instance, w_out, w_dag_out;
    double w_eps = 0.25;
    long long w_iters = 0;
    bool w_oracle = false;
    auto* cmd_weights = app.add_subcommand("weights", "compute proportional weights");
    cmd_weights->add_option("--instance", w_instance)->required();
    cmd_weights->add_option("--epsilon", w_eps);
    cmd_weights->add_option("--max-iters", w_iters);
    cmd_weights->add_flag("--with-oracle", w_oracle);
    cmd_weights->add_option("--out", w_out);
    cmd_weights->add_option("--dag-out", w_dag_out);

    std::string e_instance, e_weights, e_out;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate the proportional allocation");
    cmd_eval->add_option("--instance", e_instance)->required();
    cmd_eval->add_option("--weights", e_weights)->required();
    cmd_eval->add_option("--out", e_out);

    SimulateConfig sim;
    auto* cmd_sim = app.add_subcommand("simulate", "online simulation");
    cmd_sim->add_option("--instance", sim.instance);
    cmd_sim->add_option("--weights", sim.weights);
    cmd_sim->add_option("--trace", sim.trace);
    cmd_sim->add_option("--adversary", sim.adversary);
    cmd_sim->add_option("--policy", sim.policy);
    cmd_sim->add_option("--reference-weights", sim.reference_weights);
    cmd_sim->add_option("--reference-instance", sim.reference_instance);
    cmd_sim->add_option("--epsilon", sim.epsilon);
    cmd_sim->add_option("--seed", sim.seed);
    cmd_sim->add_option("--out", sim.out);
    cmd_sim->add_option("--trace-out", sim.trace_out);

    std::string l_instance, l_dist, l_out;
    int l_samples = 10, l_trials = 100;
    double l_eps = 0.25;
    std::uint64_t l_seed = 1;
    long long l_iters = 0;
    auto* cmd_learn = app.add_subcommand("learn", "averaged-instance weight learning");
    cmd_learn->add_option("--instance", l_instance)->required();
    cmd_learn->add_option("--dist", l_dist)->required();
    cmd_learn->add_option("--samples", l_samples);
    cmd_learn->add_option("--epsilon", l_eps);
    cmd_learn->add_option("--seed", l_seed);
    cmd_learn->add_option("--trials", l_trials);
    cmd_learn->add_option("--max-iters", l_iters);
    cmd_learn->add_option("--out", l_out);

    LbConfig lb;
    auto* cmd_lb = app.add_subcommand("lb", "restricted-assignment load balancing");
    cmd_lb->add_option("--mode", lb.mode);
    cmd_lb->add_option("--schedule", lb.schedule);
    cmd_lb->add_option("--perturbed", lb.perturbed);
    cmd_lb->add_option("--sample", lb.samples);
    cmd_lb->add_option("--epsilon", lb.epsilon);
    cmd_lb->add_option("--seed", lb.seed);
    cmd_lb->add_option("--sweep", lb.sweep);
    cmd_lb->add_option("--out", lb.out);

    std::string s_instance, s_out;
    double s_eps = 0.25;
    int s_count = 20;
    std::int64_t s_delta = 2;
    std::uint64_t s_seed = 1;
    long long s_iters = 0;
    auto* cmd_sweep = app.add_subcommand("sweep", "instance-robustness sweep");
    cmd_sweep->add_option("--instance", s_instance)->required();
    cmd_sweep->add_option("--epsilon", s_eps);
    cmd_sweep->add_option("--perturbations", s_count);
    cmd_sweep->add_option("--max-delta", s_delta);
    cmd_sweep->add_option("--seed", s_seed);
    cmd_sweep->add_option("--max-iters", s_iters);
    cmd_sweep->add_option("--out", s_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_weights->parsed()) {
            return run_weights(w_instance, w_eps, w_iters, w_oracle, w_out, w_dag_out);
        }
        if (cmd_eval->parsed()) return run_eval(e_instance, e_weights, e_out);
        if (cmd_sim->parsed()) return run_simulate(sim);
        if (cmd_learn->parsed()) {
            return run_learn(l_instance, l_dist, l_samples, l_eps, l_seed, l_trials, l_iters,
                             l_out);
        }
        if (cmd_lb->parsed()) return run_lb(lb);
        if (cmd_sweep->parsed()) {
            return run_sweep(s_instance, s_eps, s_count, s_delta, s_seed, s_iters, s_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::ParseError:
                return kExitBadFile;
            case ErrorKind::UndefinedRatio:
            case ErrorKind::NonTermination:
                return kExitAssumption;
            default:
                return kExitError;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return 0;
}
