#include <doctest.h>

#include <cmath>
#include <set>

#include "thzloc/sim.hpp"

using namespace thzloc;
using namespace thzloc::sim;

namespace {

SimConfig small_config(int grid = 8, int iterations = 30) {
    SimConfig c;
    c.topology.grid_rows = grid;
    c.topology.grid_cols = grid;
    c.iterations = iterations;
    return c;
}

}  // namespace

TEST_CASE("default topology") {
    const SimConfig config;
    const auto topo = build_topology(config);
    CHECK(topo.edge_length_m == doctest::Approx(21.6e-3).epsilon(1e-12));
    CHECK(topo.nodes.size() == 621);
    REQUIRE(topo.controllers.size() == 4);
    const double d = topo.edge_length_m;
    CHECK(topo.controllers.positions()[0] == Point3(0, 0, 0));
    CHECK(topo.controllers.positions()[1] == Point3(d, 0, 0));
    CHECK(topo.controllers.positions()[2] == Point3(0, d, 0));
    CHECK(topo.controllers.positions()[3] == Point3(d, d, 0));
    for (const auto& p : topo.nodes) {
        REQUIRE(p.x() >= 0.0);
        REQUIRE(p.x() <= d);
        REQUIRE(p.y() >= 0.0);
        REQUIRE(p.y() <= d);
        REQUIRE(p.z() >= 0.0);
        REQUIRE(p.z() <= d / 2);
    }
}

TEST_CASE("topology edge cases and determinism") {
    auto c = small_config(2);
    CHECK(build_topology(c).nodes.empty());

    c = small_config(6);
    const auto a = build_topology(c);
    const auto b = build_topology(c);
    CHECK(a.nodes == b.nodes);
    c.rng_seed = 2;
    CHECK(build_topology(c).nodes != a.nodes);

    c.topology.grid_rows = 1;
    CHECK_THROWS_AS(build_topology(c), std::invalid_argument);
}

TEST_CASE("one iteration with full storage") {
    auto c = small_config(6);
    auto world = make_world(c);
    const auto stats = run_iteration(world, c);
    CHECK(stats.attempts == 32);
    CHECK(stats.successes == 32);
    CHECK(world.iteration == 1);

    // 4 exchanges, 0..8 one-bits of packet reception, then 5 harvesting cycles.
    for (const auto& node : stats.nodes) {
        REQUIRE(node.outcome == AttemptOutcome::success);
        bool matched = false;
        for (int ones = 0; ones <= 8; ++ones) {
            const energy::EnergyState spent{800.0 - 4.4 - 0.1 * ones, true};
            if (std::abs(energy::harvest(spent, 0.1, c.harvester).energy_pj - node.energy_after_pj) < 1e-9) {
                matched = true;
            }
        }
        REQUIRE(matched);
    }
}

TEST_CASE("nodes below the turn-off threshold cannot localize") {
    auto c = small_config(5, 1);
    c.initial_energy_pj = 5.0;
    auto world = make_world(c);
    const auto stats = run_iteration(world, c);
    CHECK(stats.successes == 0);
    for (const auto& node : stats.nodes) {
        CHECK(node.outcome == AttemptOutcome::node_energy_depleted);
        CHECK(node.energy_after_pj > 5.0);  // harvesting still happens
    }
}

TEST_CASE("operational packet costs 0.1 pJ per one-bit, 0.4 pJ on average") {
    SimConfig c;
    c.update_period_s = 0.01;  // shorter than one harvesting cycle
    auto world = make_world(c);
    const auto stats = run_iteration(world, c);
    double packet = 0.0;
    for (const auto& node : stats.nodes) {
        const double cost = 800.0 - 4.4 - node.energy_after_pj;
        const double ones = cost / 0.1;
        REQUIRE(std::abs(ones - std::round(ones)) < 1e-6);
        packet += cost;
    }
    CHECK(packet / static_cast<double>(stats.nodes.size()) == doctest::Approx(0.4).epsilon(0.075));
}

TEST_CASE("out-of-range controllers are reported as link failures") {
    auto c = small_config(8, 3);
    c.topology.spacing_m = 3e-3;
    c.channel.receiver_sensitivity_dbm = -80.0;
    const auto r = run_simulation(c);
    CHECK(r.failed_link > 0);
    CHECK(r.successes + r.failed_energy + r.failed_link + r.failed_geometry == r.attempts);
}

TEST_CASE("report accounting") {
    auto c = small_config(7, 40);
    c.update_period_s = 0.02;
    const auto r = run_simulation(c);
    CHECK(r.attempts == 45u * 40u);
    CHECK(r.successes + r.failed_energy + r.failed_link + r.failed_geometry == r.attempts);
    CHECK(r.availability == doctest::Approx(double(r.successes) / double(r.attempts)));
    CHECK(r.successes_per_iteration.size() == 40);
    std::size_t sum = 0;
    for (auto s : r.successes_per_iteration) sum += s;
    CHECK(sum == r.successes);
    CHECK(r.mean_error_m > 0.0);
    CHECK(r.error_samples.empty());

    c.keep_error_samples = true;
    const auto kept = run_simulation(c);
    CHECK(kept.error_samples.size() == kept.successes);
    CHECK(kept.p90_error_m == percentile_nearest_rank(kept.error_samples, 0.9));
}

TEST_CASE("no harvesting nodes") {
    auto c = small_config(2, 5);
    const auto r = run_simulation(c);
    CHECK(r.attempts == 0);
    CHECK(r.availability == 0.0);
    CHECK(std::isnan(r.mean_error_m));
}

TEST_CASE("results do not depend on the thread count") {
    auto c = small_config(9, 25);
    c.keep_error_samples = true;
    const auto one = run_simulation(c);
    c.threads = 4;
    const auto four = run_simulation(c);
    CHECK(one.error_samples == four.error_samples);
    CHECK(one.successes_per_iteration == four.successes_per_iteration);
    CHECK(one.mean_error_m == four.mean_error_m);
    CHECK(one.p90_error_m == four.p90_error_m);
}

TEST_CASE("mobility resampling redraws positions each iteration") {
    auto c = small_config(5, 3);
    auto world = make_world(c);
    const auto initial = world.topology.nodes;
    run_iteration(world, c);
    CHECK(world.topology.nodes == initial);

    c.mobility_resample = true;
    auto moving = make_world(c);
    run_iteration(moving, c);
    CHECK(moving.topology.nodes == initial);  // iteration 0 uses the initial draw
    run_iteration(moving, c);
    CHECK(moving.topology.nodes != initial);
}

TEST_CASE("nearest-rank percentile") {
    CHECK(percentile_nearest_rank({10, 9, 8, 7, 6, 5, 4, 3, 2, 1}, 0.9) == 9.0);
    CHECK(percentile_nearest_rank({3.5}, 0.9) == 3.5);
    CHECK(percentile_nearest_rank({1, 2, 3}, 0.9) == 3.0);
    CHECK(std::isnan(percentile_nearest_rank({}, 0.9)));
}

TEST_CASE("config validation") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.iterations = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.update_period_s = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.initial_energy_pj = 900.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
