#include "propflow/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "propflow/errors.hpp"

namespace propflow {

namespace {

std::string node_name(int i) { return "v" + std::to_string(i + 1); }

// non-empty random subset of [0, n)
std::vector<int> random_subset(int n, Rng& rng) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        if (rng.next_real() < 0.5) out.push_back(i);
    }
    if (out.empty()) out.push_back(static_cast<int>(rng.next_index(n)));
    return out;
}

}  // namespace

DagInstance random_bipartite_instance(const BipartiteGenParams& params, Rng& rng) {
    DagInstance inst;
    inst.sink = "t";
    for (int i = 0; i < params.advertisers; ++i) {
        inst.offline_nodes.push_back(
            {node_name(i), Rational(rng.next_int(params.min_capacity, params.max_capacity))});
        inst.edges.emplace_back(node_name(i), "t");
    }
    for (int i = 0; i < params.types; ++i) {
        ImpressionType t;
        t.id = "i" + std::to_string(i + 1);
        t.count = Rational(rng.next_int(0, params.max_count));
        for (int v : random_subset(params.advertisers, rng)) t.neighbors.push_back(node_name(v));
        inst.impression_types.push_back(std::move(t));
    }
    return inst;
}

DagInstance random_layered_instance(const LayeredGenParams& params, Rng& rng) {
    DagInstance inst;
    inst.sink = "t";
    std::vector<std::vector<std::string>> layers(params.depth);
    int counter = 0;
    for (int j = 0; j < params.depth; ++j) {
        int width = 1 + static_cast<int>(rng.next_index(params.max_per_layer));
        for (int i = 0; i < width; ++i) {
            std::string id = "L" + std::to_string(j + 1) + "_" + std::to_string(i + 1);
            layers[j].push_back(id);
            inst.offline_nodes.push_back(
                {id, Rational(rng.next_int(params.min_capacity, params.max_capacity))});
            ++counter;
        }
    }
    (void)counter;
    // each node gets at least one out-edge; each non-first-layer node at
    // least one in-edge, which pins its longest distance to its layer
    for (int j = 0; j + 1 < params.depth; ++j) {
        for (const auto& u : layers[j]) {
            std::vector<int> targets = random_subset(static_cast<int>(layers[j + 1].size()), rng);
            for (int v : targets) inst.edges.emplace_back(u, layers[j + 1][v]);
        }
        for (std::size_t v = 0; v < layers[j + 1].size(); ++v) {
            bool covered = false;
            for (const auto& [a, b] : inst.edges) {
                if (b == layers[j + 1][v]) { covered = true; break; }
            }
            if (!covered) {
                std::size_t u = rng.next_index(layers[j].size());
                inst.edges.emplace_back(layers[j][u], layers[j + 1][v]);
            }
        }
    }
    for (const auto& u : layers[params.depth - 1]) inst.edges.emplace_back(u, "t");

    for (int i = 0; i < params.types; ++i) {
        ImpressionType t;
        t.id = "i" + std::to_string(i + 1);
        t.count = Rational(rng.next_int(0, params.max_count));
        for (int v : random_subset(static_cast<int>(layers[0].size()), rng)) {
            t.neighbors.push_back(layers[0][v]);
        }
        inst.impression_types.push_back(std::move(t));
    }
    // every first-layer node should be a neighbor of some type, or it would
    // sit unreached and change the layer structure
    for (std::size_t v = 0; v < layers[0].size(); ++v) {
        bool covered = false;
        for (const auto& t : inst.impression_types) {
            if (std::find(t.neighbors.begin(), t.neighbors.end(), layers[0][v]) != t.neighbors.end()) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            inst.impression_types[rng.next_index(inst.impression_types.size())]
                .neighbors.push_back(layers[0][v]);
        }
    }
    return inst;
}

DagInstance random_dag_instance(const DagGenParams& params, Rng& rng) {
    DagInstance inst;
    inst.sink = "t";
    for (int i = 0; i < params.nodes; ++i) {
        inst.offline_nodes.push_back({node_name(i), Rational(rng.next_int(1, params.max_capacity))});
    }
    std::set<std::pair<int, int>> used;
    // a random forward chain keeps everything on a path to t
    for (int i = 0; i < params.nodes; ++i) {
        if (i + 1 < params.nodes && rng.next_real() < 0.7) {
            inst.edges.emplace_back(node_name(i), node_name(i + 1));
            used.insert({i, i + 1});
        } else {
            inst.edges.emplace_back(node_name(i), "t");
            used.insert({i, params.nodes});
        }
    }
    for (int i = 0; i < params.nodes; ++i) {
        for (int j = i + 1; j <= params.nodes; ++j) {
            if (used.count({i, j})) continue;
            if (rng.next_real() < params.extra_edge_prob) {
                inst.edges.emplace_back(node_name(i), j == params.nodes ? "t" : node_name(j));
                used.insert({i, j});
            }
        }
    }
    for (int i = 0; i < params.types; ++i) {
        ImpressionType t;
        t.id = "i" + std::to_string(i + 1);
        t.count = Rational(rng.next_int(0, params.max_count));
        for (int v : random_subset(params.nodes, rng)) t.neighbors.push_back(node_name(v));
        inst.impression_types.push_back(std::move(t));
    }
    return inst;
}

ScheduleInstance random_schedule_instance(const ScheduleGenParams& params, Rng& rng) {
    ScheduleInstance inst;
    inst.machines = params.machines;
    for (int j = 0; j < params.jobs; ++j) {
        Job job;
        job.id = "j" + std::to_string(j + 1);
        job.size = Rational(rng.next_int(1, params.max_size));
        for (int m : random_subset(params.machines, rng)) job.neighborhood.push_back(m + 1);
        inst.jobs.push_back(std::move(job));
    }
    return inst;
}

LearnFlowSetup random_learnable_bipartite(int advertisers, double eps, Rng& rng) {
    LearnFlowSetup setup;
    setup.capacity_floor =
        static_cast<std::int64_t>(std::ceil(2.0 / (eps * eps) * std::log(1.0 / eps)));
    setup.skeleton.sink = "t";
    std::int64_t total_capacity = 0;
    for (int i = 0; i < advertisers; ++i) {
        std::int64_t cap = setup.capacity_floor + rng.next_int(0, setup.capacity_floor / 2);
        total_capacity += cap;
        setup.skeleton.offline_nodes.push_back({node_name(i), Rational(cap)});
        setup.skeleton.edges.emplace_back(node_name(i), "t");
    }
    int types = std::max(2, advertisers);
    for (int i = 0; i < types; ++i) {
        ImpressionType t;
        t.id = "i" + std::to_string(i + 1);
        t.count = Rational(0);
        for (int v : random_subset(advertisers, rng)) t.neighbors.push_back(node_name(v));
        setup.skeleton.impression_types.push_back(std::move(t));
    }
    setup.dist.kind = TypeDistribution::Kind::Iid;
    setup.dist.m = static_cast<int>(total_capacity);
    double remaining = 1.0;
    for (int i = 0; i < types; ++i) {
        double p = i + 1 == types ? remaining : remaining * rng.next_real(0.2, 0.8);
        setup.dist.support.push_back({"i" + std::to_string(i + 1), p});
        remaining -= p;
    }
    return setup;
}

LearnFlowSetup random_learnable_layered(double eps, Rng& rng, int depth) {
    LearnFlowSetup setup;
    setup.capacity_floor =
        static_cast<std::int64_t>(std::ceil(2.0 / (eps * eps) * std::log(1.0 / eps)));
    LayeredGenParams params;
    params.depth = depth;
    params.max_per_layer = 2;
    params.types = 3;
    params.max_capacity = 1;  // capacities rewritten below
    params.max_count = 0;
    setup.skeleton = random_layered_instance(params, rng);
    for (auto& node : setup.skeleton.offline_nodes) {
        node.capacity = Rational(setup.capacity_floor + rng.next_int(0, setup.capacity_floor / 2));
    }
    std::int64_t first_layer_capacity = 0;
    for (const auto& node : setup.skeleton.offline_nodes) {
        if (node.id.rfind("L1_", 0) == 0) first_layer_capacity += node.capacity.num();
    }
    setup.dist.kind = TypeDistribution::Kind::Iid;
    setup.dist.m = static_cast<int>(first_layer_capacity);
    double remaining = 1.0;
    int types = static_cast<int>(setup.skeleton.impression_types.size());
    for (int i = 0; i < types; ++i) {
        double p = i + 1 == types ? remaining : remaining * rng.next_real(0.2, 0.8);
        setup.dist.support.push_back({setup.skeleton.impression_types[i].id, p});
        remaining -= p;
    }
    return setup;
}

ScheduleInstance LearnLbSetup::sample(Rng& rng) const {
    ScheduleInstance inst;
    inst.machines = machines;
    for (int j = 0; j < jobs; ++j) {
        Job job;
        job.id = "j" + std::to_string(j + 1);
        job.size = Rational(1);
        double u = rng.next_real();
        double acc = 0;
        std::size_t pick = slot_neighborhoods[j].size() - 1;
        for (std::size_t c = 0; c < slot_probs[j].size(); ++c) {
            acc += slot_probs[j][c];
            if (u < acc) { pick = c; break; }
        }
        job.neighborhood = slot_neighborhoods[j][pick];
        inst.jobs.push_back(std::move(job));
    }
    return inst;
}

LearnLbSetup random_learnable_schedule(int machines, int jobs, Rng& rng) {
    LearnLbSetup setup;
    setup.machines = machines;
    setup.jobs = jobs;
    for (int j = 0; j < jobs; ++j) {
        std::vector<std::vector<int>> choices;
        std::vector<double> probs;
        int n_choices = 2;
        double remaining = 1.0;
        for (int c = 0; c < n_choices; ++c) {
            std::vector<int> nb;
            for (int m : random_subset(machines, rng)) nb.push_back(m + 1);
            choices.push_back(nb);
            double p = c + 1 == n_choices ? remaining : remaining * rng.next_real(0.3, 0.7);
            probs.push_back(p);
            remaining -= p;
        }
        setup.slot_neighborhoods.push_back(choices);
        setup.slot_probs.push_back(probs);
    }
    return setup;
}

}  // namespace propflow
