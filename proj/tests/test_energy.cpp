#include <doctest.h>

#include <cmath>
#include <random>

#include "thzloc/energy.hpp"

using namespace thzloc::energy;

namespace {

// Reference values below were evaluated at 40 significant digits, independently
// of this code, from C = 2 E_max / V_g^2 and the exponential charging curve.
constexpr double kCapacitance800 = 9.070294784580498866e-9;
constexpr double kCapacitance400 = 4.535147392290249598e-9;
constexpr double kEnergyCycle1 = 1.981377282196214078e-3;
constexpr double kEnergyCycle5 = 4.922359029248839513e-2;

HarvesterParams defaults() { return {}; }

}  // namespace

TEST_CASE("capacitance from storage limit and generator voltage") {
    auto p = defaults();
    CHECK(capacitance(p) == doctest::Approx(kCapacitance800).epsilon(1e-12));
    p.max_storage_pj = 400.0;
    CHECK(capacitance(p) == doctest::Approx(kCapacitance400).epsilon(1e-12));

    // E_max = C V^2 / 2 inverts exactly.
    const double c = 3.3e-9, v = 0.7;
    p.generator_voltage_v = v;
    p.max_storage_pj = 0.5 * c * v * v * 1e12;
    CHECK(capacitance(p) == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("energy_at_cycle closed form") {
    const auto p = defaults();
    CHECK(energy_at_cycle(0, p) == 0.0);
    CHECK(energy_at_cycle(1, p) == doctest::Approx(kEnergyCycle1).epsilon(1e-10));
    CHECK(energy_at_cycle(5, p) == doctest::Approx(kEnergyCycle5).epsilon(1e-10));
    CHECK(std::abs(energy_at_cycle(10'000'000, p) - 800.0) <= 1e-6 * 800.0);
    CHECK_THROWS_AS(energy_at_cycle(-1, p), std::domain_error);
}

TEST_CASE("energy_at_cycle is strictly increasing and bounded") {
    const auto p = defaults();
    double prev = energy_at_cycle(0, p);
    for (std::int64_t n = 1; n <= 6000; ++n) {
        const double e = energy_at_cycle(n, p);
        REQUIRE(e > prev);
        REQUIRE(e <= p.max_storage_pj);
        prev = e;
    }
}

TEST_CASE("cycle_index") {
    const auto p = defaults();
    CHECK(cycle_index(0.0, p) == 0);
    CHECK(cycle_index(400.0, p) == 780);
    // Just above a cycle's energy rounds up to the next cycle.
    CHECK(cycle_index(energy_at_cycle(10, p) * (1.0 + 1e-3), p) == 11);
    CHECK_THROWS_AS(cycle_index(800.0, p), SaturationError);
    CHECK_THROWS_AS(cycle_index(900.0, p), SaturationError);
    CHECK_THROWS_AS(cycle_index(-1.0, p), std::domain_error);
}

TEST_CASE("cycle_index inverts energy_at_cycle for k in [1, 1e4]") {
    const auto p = defaults();
    for (std::int64_t k = 1; k <= 10'000; ++k) {
        REQUIRE(cycle_index(energy_at_cycle(k, p), p) == k);
    }
    // Other harvester settings.
    auto q = p;
    q.charge_per_cycle_pc = 2.0;
    q.generator_voltage_v = 0.3;
    for (std::int64_t k = 1; k <= 2000; k += 7) {
        REQUIRE(cycle_index(energy_at_cycle(k, q), q) == k);
    }
}

TEST_CASE("harvest") {
    const auto p = defaults();
    const EnergyState s{100.0, true};
    CHECK(harvest(s, 0.0, p) == s);
    // Less than one cycle is discarded.
    CHECK(harvest(s, 0.019, p) == s);

    const EnergyState full{800.0, true};
    CHECK(harvest(full, 5.0, p).energy_pj == 800.0);

    const EnergyState empty{0.0, false};
    const auto after = harvest(empty, 0.1, p);
    CHECK(after.energy_pj == doctest::Approx(kEnergyCycle5).epsilon(1e-10));
    CHECK_FALSE(after.operational);

    // Long harvests saturate at E_max.
    CHECK(harvest(empty, 1e6, p).energy_pj == doctest::Approx(800.0));
}

TEST_CASE("harvest turns the node back on at the turn-on threshold") {
    auto p = defaults();
    // Defaults collapse turn-on onto the 10 pJ turn-off threshold.
    CHECK(p.effective_turn_on_pj() == 10.0);
    const auto from_below = harvest({9.0, false}, 0.1, p);
    CHECK(from_below.energy_pj > 10.0);
    CHECK(from_below.operational);

    p.turn_on_threshold_pj = 50.0;
    const auto still_off = harvest({9.0, false}, 0.1, p);
    CHECK(still_off.energy_pj > 10.0);
    CHECK_FALSE(still_off.operational);
}

TEST_CASE("consume and can_afford") {
    const auto p = defaults();
    auto s = consume({100.0, true}, 4.4, p);
    CHECK(s.energy_pj == doctest::Approx(95.6));
    CHECK(s.operational);

    s = consume({12.0, true}, 4.4, p);
    CHECK(s.energy_pj == doctest::Approx(7.6));
    CHECK_FALSE(s.operational);

    s = consume({3.0, true}, 5.0, p);
    CHECK(s.energy_pj == 0.0);
    CHECK_FALSE(s.operational);

    // Landing exactly on the threshold keeps the node on.
    CHECK(consume({14.4, true}, 4.4, p).operational == (14.4 - 4.4 >= 10.0));

    CHECK(can_afford({800.0, true}, 4.4));
    CHECK_FALSE(can_afford({800.0, false}, 4.4));
    CHECK(can_afford({4.4, true}, 4.4));
    CHECK_FALSE(can_afford({4.3, true}, 4.4));
}

TEST_CASE("parameter validation") {
    auto p = defaults();
    CHECK_NOTHROW(p.validate());
    p.turn_off_threshold_pj = 800.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.generator_voltage_v = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.turn_on_threshold_pj = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("random interleavings keep energy in range and honour hysteresis") {
    auto p = defaults();
    p.turn_on_threshold_pj = 30.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amount(0.0, 20.0);
    std::uniform_real_distribution<double> elapsed(0.0, 0.5);
    std::bernoulli_distribution pick(0.5);

    EnergyState s = make_state(400.0, p);
    for (int i = 0; i < 20000; ++i) {
        const EnergyState before = s;
        if (pick(rng)) {
            s = harvest(s, elapsed(rng), p);
            REQUIRE(s.energy_pj >= before.energy_pj);
            // Harvest only ever switches on, and only above turn-on.
            if (s.operational != before.operational) {
                REQUIRE(s.operational);
                REQUIRE(s.energy_pj >= p.turn_on_threshold_pj);
            }
        } else {
            s = consume(s, amount(rng), p);
            REQUIRE(s.energy_pj <= before.energy_pj);
            if (s.operational != before.operational) {
                REQUIRE_FALSE(s.operational);
                REQUIRE(s.energy_pj < p.turn_off_threshold_pj);
            }
        }
        REQUIRE(s.energy_pj >= 0.0);
        REQUIRE(s.energy_pj <= p.max_storage_pj);
    }
}
