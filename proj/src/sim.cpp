#include "thzloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "thzloc/rng.hpp"

namespace thzloc::sim {

namespace {

enum StreamTag : std::uint64_t { kTopologyStream = 1, kNodeStream = 2, kMobilityStream = 3 };

locate::AnchorSet corner_controllers(double edge) {
    return locate::AnchorSet({{0.0, 0.0, 0.0}, {edge, 0.0, 0.0}, {0.0, edge, 0.0}, {edge, edge, 0.0}});
}

void draw_positions(std::vector<Point3>& nodes, double edge, Rng& rng) {
    std::uniform_real_distribution<double> xy(0.0, edge);
    std::uniform_real_distribution<double> z(0.0, edge / 2.0);
    for (auto& p : nodes) {
        const double x = xy(rng);
        const double y = xy(rng);
        p = {x, y, z(rng)};
    }
}

AttemptOutcome outcome_of(ranging::RangeFailure f) {
    return f == ranging::RangeFailure::link_infeasible ? AttemptOutcome::link_infeasible
                                                        : AttemptOutcome::node_energy_depleted;
}

NodeAttempt step_node(std::size_t index, const Point3& node, energy::EnergyState& state,
                      const Topology& topo, const SimConfig& config, int iteration) {
    Rng rng = derive_stream(config.rng_seed,
                            {kNodeStream, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(index)});
    const ranging::LinkContext link{config.channel, config.radio, config.harvester};
    const auto controllers = topo.controllers.positions();

    NodeAttempt attempt;
    auto ranges = ranging::measure_all(node, controllers, link, state, rng);
    state = ranges.energy;
    if (ranges.complete()) {
        std::vector<double> d;
        d.reserve(ranges.measurements.size());
        for (const auto& m : ranges.measurements) d.push_back(*m.estimated_distance_m);
        try {
            locate::SolverOptions opts;
            opts.refine = config.gauss_newton_refinement;
            const auto est = locate::trilaterate(topo.controllers, d, opts);
            attempt.outcome = AttemptOutcome::success;
            attempt.error_m = locate::localization_error(node, est.position_m);
        } catch (const locate::DegenerateGeometryError&) {
            attempt.outcome = AttemptOutcome::degenerate_geometry;
        }
    } else {
        const auto first = std::find_if(ranges.measurements.begin(), ranges.measurements.end(),
                                        [](const auto& m) { return !m.ok(); });
        attempt.outcome = outcome_of(first->failure);
    }

    // Operational phase: a control packet from the closest controller. Only
    // '1' bits are pulses under on-off keying, so only those cost energy.
    std::uniform_int_distribution<unsigned> bit(0, 1);
    int ones = 0;
    for (int b = 0; b < config.radio.packet_bits; ++b) ones += static_cast<int>(bit(rng));
    const double cost = ones * config.radio.energy_rx_pulse_pj;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : controllers) nearest = std::min(nearest, (node - c).norm());
    const bool reachable = nearest > 0.0 ? channel::received_power(config.channel, nearest).received : true;
    if (reachable && energy::can_afford(state, cost)) {
        state = energy::consume(state, cost, config.harvester);
    }

    state = energy::harvest(state, config.update_period_s, config.harvester);
    attempt.energy_after_pj = state.energy_pj;
    return attempt;
}

}  // namespace

void SimConfig::validate() const {
    harvester.validate();
    channel.validate();
    radio.validate();
    if (topology.grid_rows < 2 || topology.grid_cols < 2) {
        throw std::invalid_argument("topology: grid_rows and grid_cols must be at least 2");
    }
    if (!(std::isfinite(topology.spacing_m) && topology.spacing_m > 0.0)) {
        throw std::invalid_argument("topology: spacing_m must be positive");
    }
    if (!(std::isfinite(update_period_s) && update_period_s > 0.0)) {
        throw std::invalid_argument("update_period_s must be positive");
    }
    if (iterations < 1) {
        throw std::invalid_argument("iterations must be at least 1");
    }
    if (initial_energy_pj &&
        !(std::isfinite(*initial_energy_pj) && *initial_energy_pj >= 0.0 &&
          *initial_energy_pj <= harvester.max_storage_pj)) {
        throw std::invalid_argument("initial_energy_pj must lie in [0, max_storage_pj]");
    }
    if (threads < 1) {
        throw std::invalid_argument("threads must be at least 1");
    }
}

const char* to_string(AttemptOutcome outcome) {
    switch (outcome) {
        case AttemptOutcome::success: return "success";
        case AttemptOutcome::node_energy_depleted: return "node_energy_depleted";
        case AttemptOutcome::link_infeasible: return "link_infeasible";
        case AttemptOutcome::degenerate_geometry: return "degenerate_geometry";
    }
    return "unknown";
}

Topology build_topology(const SimConfig& config) {
    const auto& tp = config.topology;
    if (tp.grid_rows < 2 || tp.grid_cols < 2) {
        throw std::invalid_argument("build_topology: grid must be at least 2x2");
    }
    const double edge = (tp.grid_cols - 1) * tp.spacing_m;
    Topology topo{tp.grid_rows, tp.grid_cols, tp.spacing_m, edge, corner_controllers(edge), {}};
    topo.nodes.resize(static_cast<std::size_t>(tp.grid_rows) * static_cast<std::size_t>(tp.grid_cols) - 4);
    Rng rng = derive_stream(config.rng_seed, {kTopologyStream});
    draw_positions(topo.nodes, edge, rng);
    return topo;
}

WorldState make_world(const SimConfig& config) {
    WorldState world{build_topology(config), {}, 0};
    const double e0 = config.initial_energy_pj.value_or(config.harvester.max_storage_pj);
    world.energy.assign(world.topology.nodes.size(), energy::make_state(e0, config.harvester));
    return world;
}

IterationStats run_iteration(WorldState& world, const SimConfig& config) {
    auto& topo = world.topology;
    const int iteration = world.iteration;
    if (config.mobility_resample && iteration > 0) {
        Rng rng = derive_stream(config.rng_seed, {kMobilityStream, static_cast<std::uint64_t>(iteration)});
        draw_positions(topo.nodes, topo.edge_length_m, rng);
    }

    IterationStats stats;
    stats.iteration = iteration;
    stats.nodes.resize(topo.nodes.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            stats.nodes[i] = step_node(i, topo.nodes[i], world.energy[i], topo, config, iteration);
        }
    };

    const std::size_t n = topo.nodes.size();
    const std::size_t workers = std::min<std::size_t>(config.threads, std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }

    stats.attempts = n;
    stats.successes = static_cast<std::size_t>(std::count_if(
        stats.nodes.begin(), stats.nodes.end(), [](const auto& a) { return a.outcome == AttemptOutcome::success; }));
    ++world.iteration;
    return stats;
}

double percentile_nearest_rank(std::vector<double> sample, double fraction) {
    if (sample.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(sample.begin(), sample.end());
    const auto rank = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sample.size())));
    return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

TrialReport run_simulation(const SimConfig& config) {
    config.validate();
    WorldState world = make_world(config);

    TrialReport report;
    std::vector<double> errors;
    errors.reserve(world.topology.nodes.size() * static_cast<std::size_t>(config.iterations));
    report.successes_per_iteration.reserve(static_cast<std::size_t>(config.iterations));

    for (int it = 0; it < config.iterations; ++it) {
        const auto stats = run_iteration(world, config);
        report.attempts += stats.attempts;
        report.successes += stats.successes;
        report.successes_per_iteration.push_back(stats.successes);
        for (const auto& a : stats.nodes) {
            switch (a.outcome) {
                case AttemptOutcome::success: errors.push_back(a.error_m); break;
                case AttemptOutcome::node_energy_depleted: ++report.failed_energy; break;
                case AttemptOutcome::link_infeasible: ++report.failed_link; break;
                case AttemptOutcome::degenerate_geometry: ++report.failed_geometry; break;
            }
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.availability = report.attempts > 0
                              ? static_cast<double>(report.successes) / static_cast<double>(report.attempts)
                              : 0.0;
    if (errors.empty()) {
        report.mean_error_m = nan;
        report.p90_error_m = nan;
    } else {
        double sum = 0.0;
        for (double e : errors) sum += e;
        report.mean_error_m = sum / static_cast<double>(errors.size());
        report.p90_error_m = percentile_nearest_rank(errors, 0.9);
    }
    if (config.keep_error_samples) report.error_samples = std::move(errors);
    return report;
}

}  // namespace thzloc::sim
