#include "propflow/learning.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "propflow/csv.hpp"
#include "propflow/errors.hpp"
#include "propflow/flow_eval.hpp"
#include "propflow/max_flow.hpp"
#include "propflow/rng.hpp"

namespace propflow {

double InstanceVector::l1_norm() const {
    double s = 0;
    for (const auto& [id, c] : counts) s += std::abs(c.to_double());
    return s;
}

double instance_distance(const InstanceVector& a, const InstanceVector& b) {
    double total = 0;
    for (const auto& [id, c] : a.counts) {
        auto it = b.counts.find(id);
        Rational other = it == b.counts.end() ? Rational(0) : it->second;
        total += std::abs((c - other).to_double());
    }
    for (const auto& [id, c] : b.counts) {
        if (!a.counts.count(id)) total += std::abs(c.to_double());
    }
    return total;
}

void TypeDistribution::check(const DagInstance& skeleton) const {
    auto check_support = [&](const std::vector<TypeSupport>& sup, const std::string& where) {
        double total = 0;
        for (const auto& s : sup) {
            if (s.probability < 0) {
                throw Error(ErrorKind::NegativeValue, "probability of type '" + s.type_id + "'");
            }
            if (!skeleton.find_type(s.type_id)) {
                throw Error(ErrorKind::UnknownNodeReference,
                            where + " references type '" + s.type_id + "'");
            }
            total += s.probability;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw Error(ErrorKind::InvalidArgument, where + " probabilities sum to " +
                                                        std::to_string(total) + ", expected 1");
        }
    };
    if (m < 0) throw Error(ErrorKind::NegativeValue, "m");
    if (kind == Kind::Iid) {
        check_support(support, "distribution");
    } else {
        if (static_cast<int>(per_slot.size()) != m) {
            throw Error(ErrorKind::InvalidArgument, "product distribution needs one support per slot");
        }
        for (std::size_t i = 0; i < per_slot.size(); ++i) {
            check_support(per_slot[i], "slot " + std::to_string(i));
        }
    }
}

void save_distribution(const TypeDistribution& dist, std::ostream& out) {
    out << "propflow-distribution v1\n";
    out << "m " << dist.m << "\n";
    out << "kind " << (dist.kind == TypeDistribution::Kind::Iid ? "iid" : "product") << "\n";
    if (dist.kind == TypeDistribution::Kind::Iid) {
        for (const auto& s : dist.support) {
            out << "type " << s.type_id << " " << format_exact(s.probability) << "\n";
        }
    } else {
        for (std::size_t i = 0; i < dist.per_slot.size(); ++i) {
            out << "slot " << i << "\n";
            for (const auto& s : dist.per_slot[i]) {
                out << "type " << s.type_id << " " << format_exact(s.probability) << "\n";
            }
        }
    }
}

TypeDistribution load_distribution(std::istream& in) {
    TypeDistribution dist;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    int slot = -1;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (!header) {
            if (key != "propflow-distribution") {
                throw Error(ErrorKind::ParseError, "line 1: not a distribution file");
            }
            header = true;
            continue;
        }
        if (key == "m") {
            ss >> dist.m;
        } else if (key == "kind") {
            std::string k;
            ss >> k;
            if (k == "iid") dist.kind = TypeDistribution::Kind::Iid;
            else if (k == "product") dist.kind = TypeDistribution::Kind::Product;
            else throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unknown kind");
        } else if (key == "slot") {
            ss >> slot;
            if (slot != static_cast<int>(dist.per_slot.size())) {
                throw Error(ErrorKind::ParseError,
                            "line " + std::to_string(line_no) + ": slots must appear in order");
            }
            dist.per_slot.emplace_back();
        } else if (key == "type") {
            TypeSupport s;
            ss >> s.type_id >> s.probability;
            if (slot >= 0) dist.per_slot[slot].push_back(s);
            else dist.support.push_back(s);
        } else {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return dist;
}

namespace {

std::size_t draw(const std::vector<TypeSupport>& support, Rng& rng) {
    double u = rng.next_real();
    double acc = 0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        acc += support[i].probability;
        if (u < acc) return i;
    }
    return support.size() - 1;
}

}  // namespace

SampledInstance sample_instance(const TypeDistribution& dist, std::uint64_t seed) {
    Rng rng(seed);
    SampledInstance out;
    for (int slot = 0; slot < dist.m; ++slot) {
        const auto& support =
            dist.kind == TypeDistribution::Kind::Iid ? dist.support : dist.per_slot[slot];
        if (support.empty()) {
            throw Error(ErrorKind::InvalidArgument, "empty support");
        }
        const auto& picked = support[draw(support, rng)];
        out.trace.arrivals.push_back(picked.type_id);
        auto [it, fresh] = out.counts.counts.emplace(picked.type_id, Rational(1));
        if (!fresh) it->second = it->second + Rational(1);
    }
    return out;
}

InstanceVector averaged_instance(const std::vector<InstanceVector>& samples, bool round_counts) {
    if (samples.empty()) {
        throw Error(ErrorKind::InvalidArgument, "averaged_instance needs at least one sample");
    }
    const std::int64_t s = static_cast<std::int64_t>(samples.size());
    InstanceVector out;
    std::set<std::string> ids;
    for (const auto& sample : samples) {
        for (const auto& [id, c] : sample.counts) ids.insert(id);
    }
    for (const auto& id : ids) {
        Rational sum;
        for (const auto& sample : samples) {
            auto it = sample.counts.find(id);
            if (it != sample.counts.end()) sum = sum + it->second;
        }
        Rational mean = sum / Rational(s);
        if (!round_counts) {
            out.counts[id] = mean;
            continue;
        }
        // nearest integer, exact ties up
        std::int64_t q = mean.num() / mean.den();
        Rational frac = mean - Rational(q);
        bool up = Rational(2) * frac >= Rational(1);
        out.counts[id] = Rational(q + (up ? 1 : 0));
    }
    return out;
}

LearnedWeights learn_weights(const std::vector<InstanceVector>& samples,
                             const DagInstance& skeleton, double eps,
                             long long max_iterations) {
    LearnedWeights out;
    out.averaged = averaged_instance(samples);
    DagInstance averaged = with_counts(skeleton, out.averaged.counts);
    DistanceMap dist = longest_distances(averaged);
    LayeredGraph layered = reduce_to_layered(averaged, dist);
    if (layered.d == 0) {
        out.weights.rho_base = 2.0;
        return out;
    }
    EpsilonSchedule schedule =
        make_schedule(layered.d, static_cast<int>(layered.max_layer_size), eps);
    WeightRunOptions options;
    options.max_iterations = max_iterations;
    WeightState state = d_layer_weights(layered, schedule, options);
    out.weights = transfer_to_dag(state, layered, dist);
    out.value_on_averaged = route_layered(layered, state).value;
    return out;
}

MonteCarloEstimate estimate_expected_value(const DagWeights& weights,
                                           const DagInstance& skeleton,
                                           const TypeDistribution& dist, int trials,
                                           std::uint64_t seed) {
    if (trials < 2) {
        throw Error(ErrorKind::InvalidArgument, "need at least 2 trials");
    }
    DistanceMap dmap = longest_distances(skeleton);
    Rng rng(seed);
    double sum = 0, sumsq = 0;
    for (int trial = 0; trial < trials; ++trial) {
        SampledInstance sample = sample_instance(dist, rng.next_u64());
        DagInstance inst = with_counts(skeleton, sample.counts.counts);
        double value = route_dag(inst, weights, dmap).value;
        sum += value;
        sumsq += value * value;
    }
    MonteCarloEstimate est;
    est.trials = trials;
    est.mean = sum / trials;
    double var = std::max(0.0, (sumsq - trials * est.mean * est.mean) / (trials - 1));
    est.std_error = std::sqrt(var / trials);
    return est;
}

RobustnessReport robustness_sweep(const DagInstance& base,
                                  const std::vector<InstanceVector>& perturbations,
                                  double eps, long long max_iterations) {
    RobustnessReport report;

    DistanceMap dmap = longest_distances(base);
    LayeredGraph layered = reduce_to_layered(base, dmap);
    if (layered.d == 0) {
        throw Error(ErrorKind::InvalidArgument, "base instance routes nothing");
    }
    EpsilonSchedule schedule =
        make_schedule(layered.d, static_cast<int>(layered.max_layer_size), eps);
    WeightRunOptions options;
    options.max_iterations = max_iterations;
    WeightState state = d_layer_weights(layered, schedule, options);
    DagWeights weights = transfer_to_dag(state, layered, dmap);

    double base_opt = max_flow_oracle(base).opt_value.to_double();
    double base_value = route_dag(base, weights, dmap).value;
    report.base_ratio = base_opt > 0 ? base_value / base_opt : 1.0;
    if (report.base_ratio < 1.0 - eps - 1e-9) {
        throw Error(ErrorKind::InvalidArgument,
                    "base weights are not a (1-eps)-approximation: ratio " +
                        std::to_string(report.base_ratio));
    }

    InstanceVector base_counts;
    for (const auto& t : base.impression_types) base_counts.counts[t.id] = t.count;

    const int d = dmap.offline_depth();
    for (const auto& perturbed_counts : perturbations) {
        DagInstance perturbed = with_counts(base, perturbed_counts.counts);
        double gamma = instance_distance(base_counts, perturbed_counts);
        double opt = max_flow_oracle(perturbed).opt_value.to_double();

        // direct routing of every arrival equals the truncated evaluation at
        // the realized counts, so the instance vector alone decides the value
        RobustnessRow row;
        row.gamma = gamma;
        row.opt = opt;
        row.value_direct = route_dag(perturbed, weights, dmap).value;

        ArrivalTrace trace;
        for (const auto& [id, c] : perturbed_counts.counts) {
            if (c.den() != 1) {
                throw Error(ErrorKind::InvalidArgument,
                            "perturbed counts must be integral to simulate arrivals");
            }
            for (std::int64_t k = 0; k < c.num(); ++k) trace.arrivals.push_back(id);
        }
        row.value_maximal = simulate_maximal(perturbed, weights, dmap, trace).value;

        row.bound = std::max((1.0 - eps) * opt - 2.0 * gamma, opt / (d + 1));
        row.ok = row.value_direct >= (1.0 - eps) * opt - 2.0 * gamma - 1e-6 &&
                 row.value_maximal >= row.bound - 1e-6;
        if (!row.ok) report.violations++;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace propflow
