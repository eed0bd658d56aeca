#include "propflow/load_balancing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "propflow/csv.hpp"
#include "propflow/errors.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/max_flow.hpp"

namespace propflow {

std::map<std::vector<int>, Rational> ScheduleInstance::type_totals() const {
    std::map<std::vector<int>, Rational> totals;
    for (const auto& job : jobs) {
        std::vector<int> key = job.neighborhood;
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        auto [it, fresh] = totals.emplace(key, job.size);
        if (!fresh) it->second = it->second + job.size;
    }
    return totals;
}

Rational ScheduleInstance::total_size() const {
    Rational total;
    for (const auto& job : jobs) total = total + job.size;
    return total;
}

void ScheduleInstance::check() const {
    if (machines < 1) throw Error(ErrorKind::InvalidArgument, "need at least one machine");
    for (const auto& job : jobs) {
        if (!(job.size > Rational(0))) {
            throw Error(ErrorKind::NegativeValue, "size of job '" + job.id + "'");
        }
        if (job.neighborhood.empty()) {
            throw Error(ErrorKind::InvalidArgument, "job '" + job.id + "' has no eligible machine");
        }
        for (int m : job.neighborhood) {
            if (m < 1 || m > machines) {
                throw Error(ErrorKind::UnknownNodeReference,
                            "job '" + job.id + "' references machine " + std::to_string(m));
            }
        }
    }
}

ScheduleInstance parse_schedule(std::istream& in) {
    ScheduleInstance inst;
    std::string line;
    std::size_t line_no = 0;
    int next_job = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (key == "machines") {
            if (!(ss >> inst.machines)) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'machines <m>'");
            }
        } else if (key == "job") {
            Job job;
            std::string size;
            if (!(ss >> size)) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'job <size> <machine>...'");
            }
            job.id = "j" + std::to_string(next_job++);
            try {
                job.size = Rational::parse(size);
            } catch (const Error& e) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
            }
            int m;
            while (ss >> m) job.neighborhood.push_back(m);
            if (job.neighborhood.empty()) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": job without machines");
            }
            inst.jobs.push_back(std::move(job));
        } else {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    inst.check();
    return inst;
}

ScheduleInstance load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return parse_schedule(in);
}

void write_schedule(const ScheduleInstance& instance, std::ostream& out) {
    out << "machines " << instance.machines << "\n";
    for (const auto& job : instance.jobs) {
        out << "job " << job.size.str();
        for (int m : job.neighborhood) out << " " << m;
        out << "\n";
    }
}

double MachineWeights::log_weight(int machine) const {
    return static_cast<double>(k[machine - 1]) * std::log(base);
}

void save_machine_weights(const MachineWeights& w, std::ostream& out) {
    out << "propflow-machine-weights v1\n";
    out << "base " << format_exact(w.base) << "\n";
    out << "grid_bound " << w.grid_bound << "\n";
    for (std::size_t i = 0; i < w.k.size(); ++i) {
        out << "machine " << (i + 1) << " " << w.k[i] << " " << format_exact(w.base - 1.0) << "\n";
    }
}

MachineWeights load_machine_weights(std::istream& in) {
    MachineWeights w;
    std::string line;
    bool header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (!header) {
            if (key != "propflow-machine-weights") {
                throw Error(ErrorKind::ParseError, "line 1: not a machine-weights file");
            }
            header = true;
            continue;
        }
        if (key == "base") ss >> w.base;
        else if (key == "grid_bound") ss >> w.grid_bound;
        else if (key == "machine") {
            int idx, k;
            double eps;
            ss >> idx >> k >> eps;
            if (static_cast<int>(w.k.size()) < idx) w.k.resize(idx, 0);
            w.k[idx - 1] = k;
        } else {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return w;
}

LoadProfile fractional_assign(const ScheduleInstance& instance, const MachineWeights& weights) {
    instance.check();
    if (static_cast<int>(weights.k.size()) != instance.machines) {
        throw Error(ErrorKind::InvalidArgument, "weight vector does not match the machine count");
    }
    LoadProfile profile;
    profile.loads.assign(instance.machines, 0.0);
    for (const auto& job : instance.jobs) {
        std::vector<double> lw(job.neighborhood.size());
        for (std::size_t j = 0; j < job.neighborhood.size(); ++j) {
            lw[j] = weights.log_weight(job.neighborhood[j]);
        }
        auto x = proportional_fractions(lw);
        for (std::size_t j = 0; j < job.neighborhood.size(); ++j) {
            profile.loads[job.neighborhood[j] - 1] += job.size.to_double() * x[j];
        }
    }
    profile.makespan = *std::max_element(profile.loads.begin(), profile.loads.end());
    return profile;
}

namespace {

// all jobs fractionally assignable with every machine load <= T?
bool feasible_makespan(const ScheduleInstance& instance, const Rational& T) {
    std::int64_t scale = T.den();
    for (const auto& job : instance.jobs) scale = checked_lcm(scale, job.size.den());

    auto scaled = [&](const Rational& r) {
        __int128 v = static_cast<__int128>(r.num()) * (scale / r.den());
        if (v > std::numeric_limits<std::int64_t>::max() / 4) {
            throw Error(ErrorKind::CapacityOverflow, "scaled makespan bound too large");
        }
        return static_cast<std::int64_t>(v);
    };

    const std::size_t source = 0, sink = 1;
    auto job_node = [&](std::size_t j) { return 2 + j; };
    auto machine_node = [&](int i) { return 2 + instance.jobs.size() + (i - 1); };

    IntMaxFlow net(2 + instance.jobs.size() + instance.machines);
    std::int64_t supply = 0;
    for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
        std::int64_t sz = scaled(instance.jobs[j].size);
        supply += sz;
        net.add_arc(source, job_node(j), sz);
        for (int m : instance.jobs[j].neighborhood) net.add_arc(job_node(j), machine_node(m), sz);
    }
    for (int i = 1; i <= instance.machines; ++i) net.add_arc(machine_node(i), sink, scaled(T));
    return net.run(source, sink) == supply;
}

}  // namespace

double opt_makespan(const ScheduleInstance& instance) {
    instance.check();
    if (instance.jobs.empty()) return 0.0;
    Rational lo(0);
    Rational hi = instance.total_size();
    // dyadic midpoints keep the feasibility check exact
    for (int iter = 0; iter < 64 && (hi - lo).to_double() > 1e-9; ++iter) {
        Rational mid = (lo + hi) / Rational(2);
        if (feasible_makespan(instance, mid)) hi = mid;
        else lo = mid;
    }
    return hi.to_double();
}

namespace {

// Shared decrease loop: machines start at weight 1 and drop by (1+delta)
// whenever their size-weighted load exceeds the target.
MachineWeights proportional_machine_loop(const ScheduleInstance& instance, double target,
                                         double delta, long long rounds,
                                         const MakespanOptions& options) {
    MachineWeights w;
    w.base = 1.0 + delta;
    w.grid_bound = rounds;
    w.k.assign(instance.machines, 0);

    std::vector<double> loads(instance.machines);
    for (long long t = 1; t <= rounds; ++t) {
        std::fill(loads.begin(), loads.end(), 0.0);
        for (const auto& job : instance.jobs) {
            std::vector<double> lw(job.neighborhood.size());
            for (std::size_t j = 0; j < job.neighborhood.size(); ++j) {
                lw[j] = w.log_weight(job.neighborhood[j]);
            }
            auto x = proportional_fractions(lw);
            for (std::size_t j = 0; j < job.neighborhood.size(); ++j) {
                loads[job.neighborhood[j] - 1] += job.size.to_double() * x[j];
            }
        }
        bool any = false;
        for (int i = 0; i < instance.machines; ++i) {
            if (loads[i] > (1.0 + delta) * target + 1e-12) {
                w.k[i] -= 1;
                any = true;
            }
        }
        if (!any && options.early_exit) break;
    }
    return w;
}

}  // namespace

MachineWeights makespan_weights(const ScheduleInstance& instance, double eps,
                                const MakespanOptions& options) {
    instance.check();
    if (!(eps > 0.0 && eps < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "epsilon must be in (0,1)");
    }
    double T = opt_makespan(instance);
    if (T <= 0.0) {
        MachineWeights w;
        w.base = 1.0 + eps / instance.machines;
        w.grid_bound = 1;
        w.k.assign(instance.machines, 0);
        return w;
    }
    double delta = eps / instance.machines;
    if (delta < 1e-12) {
        throw Error(ErrorKind::UnderflowRisk, "eps/m underflows the weight grid");
    }
    long long rounds = static_cast<long long>(
        std::ceil(options.iteration_constant / (delta * delta) * std::log(instance.machines / delta)));
    rounds = std::min(rounds, options.hard_cap);
    return proportional_machine_loop(instance, T, delta, rounds, options);
}

double instance_ratio(const ScheduleInstance& a, const ScheduleInstance& b) {
    auto ta = a.type_totals();
    auto tb = b.type_totals();
    double eta = 1.0;
    auto account = [&](const std::vector<int>& key, const Rational& sa, const Rational& sb) {
        if (sa.is_zero() && sb.is_zero()) return;
        if (sa.is_zero() || sb.is_zero()) {
            std::string ids;
            for (int m : key) ids += (ids.empty() ? "" : " ") + std::to_string(m);
            throw Error(ErrorKind::UndefinedRatio,
                        "type {" + ids + "} has zero total size on one side only");
        }
        double r = (sa / sb).to_double();
        eta = std::max(eta, std::max(r, 1.0 / r));
    };
    for (const auto& [key, sa] : ta) {
        auto it = tb.find(key);
        account(key, sa, it == tb.end() ? Rational(0) : it->second);
    }
    for (const auto& [key, sb] : tb) {
        if (!ta.count(key)) account(key, Rational(0), sb);
    }
    return eta;
}

LbRobustnessReport lb_robustness_check(const ScheduleInstance& base,
                                       const ScheduleInstance& perturbed, double eps,
                                       const MachineWeights& weights) {
    double base_opt = opt_makespan(base);
    double base_alg = fractional_assign(base, weights).makespan;
    if (base_alg > (1.0 + eps) * base_opt + 1e-6) {
        throw Error(ErrorKind::InvalidArgument,
                    "weights are not (1+eps)-optimal on the base instance");
    }
    LbRobustnessReport report;
    report.eta = instance_ratio(base, perturbed);
    report.alg_on_perturbed = fractional_assign(perturbed, weights).makespan;
    report.opt_perturbed = opt_makespan(perturbed);
    report.bound = (1.0 + eps) * (1.0 + eps) * report.eta * report.eta * report.opt_perturbed;
    report.slack = report.bound - report.alg_on_perturbed;
    report.ok = report.alg_on_perturbed <= report.bound + 1e-6;
    return report;
}

MachineWeights learn_machine_weights(const std::vector<ScheduleInstance>& samples, double eps,
                                     const MakespanOptions& options) {
    if (samples.empty()) {
        throw Error(ErrorKind::InvalidArgument, "learn_machine_weights needs samples");
    }
    ScheduleInstance stacked;
    stacked.machines = samples.front().machines;
    double T = 0.0;
    for (const auto& sample : samples) {
        if (sample.machines != stacked.machines) {
            throw Error(ErrorKind::InvalidArgument, "samples disagree on the machine count");
        }
        T += opt_makespan(sample);
        for (const auto& job : sample.jobs) stacked.jobs.push_back(job);
    }
    stacked.check();
    double delta = eps / stacked.machines;
    long long rounds = static_cast<long long>(
        std::ceil(options.iteration_constant / (delta * delta) * std::log(stacked.machines / delta)));
    rounds = std::min(rounds, options.hard_cap);
    return proportional_machine_loop(stacked, T, delta, rounds, options);
}

}  // namespace propflow
