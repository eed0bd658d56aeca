#ifndef PROPFLOW_LOAD_BALANCING_HPP
#define PROPFLOW_LOAD_BALANCING_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "propflow/rational.hpp"

namespace propflow {

struct Job {
    std::string id;
    Rational size;                  // > 0
    std::vector<int> neighborhood;  // eligible machines, 1-based, non-empty
};

// Restricted-assignment instance. A job's type is its neighborhood; the
// per-type size totals S_j drive the robustness ratio.
struct ScheduleInstance {
    int machines = 0;
    std::vector<Job> jobs;

    // canonical type key -> total size of that type's jobs
    std::map<std::vector<int>, Rational> type_totals() const;
    Rational total_size() const;
    void check() const;
};

ScheduleInstance parse_schedule(std::istream& in);
ScheduleInstance load_schedule(const std::string& path);
void write_schedule(const ScheduleInstance& instance, std::ostream& out);

// Machine weights on the (1+eps)^k grid; k is stored, never the float.
struct MachineWeights {
    std::vector<int> k;      // per machine; weight_i = base^(k_i)
    double base = 0;         // 1 + eps of the run
    long long grid_bound = 0;  // R; every |k| <= R

    double log_weight(int machine) const;  // natural log, machine 1-based
};

void save_machine_weights(const MachineWeights& w, std::ostream& out);
MachineWeights load_machine_weights(std::istream& in);

struct LoadProfile {
    std::vector<double> loads;  // per machine
    double makespan = 0;
};

// x_ij = w_i / sum_{i' in N(j)} w_i'; loads are linear in job sizes.
LoadProfile fractional_assign(const ScheduleInstance& instance, const MachineWeights& weights);

// Exact fractional optimal makespan by binary search on T with an exact
// max-flow feasibility check, to 1e-9 absolute.
double opt_makespan(const ScheduleInstance& instance);

struct MakespanOptions {
    double iteration_constant = 4;  // c in R = ceil(c (1/delta^2) ln(m/delta))
    long long hard_cap = 1000000;
    bool early_exit = true;
};

// Proportional-weights computation with delta = eps/m and T_i = opt
// makespan. Job sizes weight the allocation directly; unit copies are never
// materialized. Resulting fractional makespan is at most (1+eps) OPT.
MachineWeights makespan_weights(const ScheduleInstance& instance, double eps,
                                const MakespanOptions& options = {});

// eta(S, S') = max_j max(S_j/S'_j, S'_j/S_j) over job types. Throws
// UndefinedRatio when exactly one side of a type is zero.
double instance_ratio(const ScheduleInstance& a, const ScheduleInstance& b);

struct LbRobustnessReport {
    double eta = 1;
    double alg_on_perturbed = 0;
    double opt_perturbed = 0;
    double bound = 0;  // (1+eps)^2 eta^2 OPT(perturbed)
    double slack = 0;
    bool ok = false;
};

// Verifies weights near-optimal on the base, then checks
// ALG(perturbed, w) <= (1+eps)^2 eta^2 OPT(perturbed).
LbRobustnessReport lb_robustness_check(const ScheduleInstance& base,
                                       const ScheduleInstance& perturbed, double eps,
                                       const MachineWeights& weights);

// Stacks all sampled jobs into one instance with T = sum of per-sample
// optima and runs the makespan iteration against that target.
MachineWeights learn_machine_weights(const std::vector<ScheduleInstance>& samples, double eps,
                                     const MakespanOptions& options = {});

}  // namespace propflow

#endif
