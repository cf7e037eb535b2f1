#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "thzloc/channel.hpp"
#include "thzloc/energy.hpp"
#include "thzloc/locate.hpp"
#include "thzloc/ranging.hpp"

namespace thzloc::sim {

using locate::Point3;

struct TopologyParams {
    int grid_rows = 25;
    int grid_cols = 25;
    double spacing_m = 0.9e-3;
};

struct SimConfig {
    energy::HarvesterParams harvester;
    channel::ChannelParams channel;
    ranging::RadioParams radio;
    TopologyParams topology;
    double update_period_s = 0.1;
    int iterations = 1000;
    std::uint64_t rng_seed = 1;
    // Energy every node starts with; full storage when unset.
    std::optional<double> initial_energy_pj;
    // Redraw node positions at the start of every iteration.
    bool mobility_resample = false;
    bool gauss_newton_refinement = true;
    // Worker threads for the per-node loop. Results do not depend on it.
    unsigned threads = 1;
    bool keep_error_samples = false;

    /// Throws std::invalid_argument / channel::ConfigurationError on the
    /// first violated invariant.
    void validate() const;
};

struct Topology {
    int rows = 0;
    int cols = 0;
    double spacing_m = 0.0;
    double edge_length_m = 0.0;  // distance between controllers on one grid edge
    locate::AnchorSet controllers;
    std::vector<Point3> nodes;   // true positions of the harvesting nodes
};

/// Corner controllers at z = 0 and harvesting nodes drawn uniformly from the
/// box [0, d] x [0, d] x [0, d/2], d = (cols - 1) * spacing.
Topology build_topology(const SimConfig& config);

enum class AttemptOutcome { success, node_energy_depleted, link_infeasible, degenerate_geometry };

const char* to_string(AttemptOutcome outcome);

struct NodeAttempt {
    AttemptOutcome outcome = AttemptOutcome::node_energy_depleted;
    double error_m = 0.0;  // valid on success
    double energy_after_pj = 0.0;
};

struct WorldState {
    Topology topology;
    std::vector<energy::EnergyState> energy;
    int iteration = 0;
};

WorldState make_world(const SimConfig& config);

struct IterationStats {
    int iteration = 0;
    std::size_t attempts = 0;
    std::size_t successes = 0;
    std::vector<NodeAttempt> nodes;
};

/// One location update period for every node: localization phase,
/// operational-phase packet reception, then harvesting.
IterationStats run_iteration(WorldState& world, const SimConfig& config);

struct TrialReport {
    double mean_error_m = 0.0;
    double p90_error_m = 0.0;
    double availability = 0.0;
    std::size_t attempts = 0;
    std::size_t successes = 0;
    std::size_t failed_energy = 0;
    std::size_t failed_link = 0;
    std::size_t failed_geometry = 0;
    std::vector<std::size_t> successes_per_iteration;
    std::vector<double> error_samples;  // filled only with keep_error_samples
};

TrialReport run_simulation(const SimConfig& config);

/// Nearest-rank percentile of an unsorted sample; NaN for an empty sample.
double percentile_nearest_rank(std::vector<double> sample, double fraction);

}  // namespace thzloc::sim
