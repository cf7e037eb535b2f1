#include "thzloc/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thzloc::energy {

namespace {

constexpr double kPico = 1e-12;

// Cycle counts computed from the closed-form inverse land within this distance
// of an integer when the energy was itself produced by energy_at_cycle().
constexpr double kCycleSnap = 1e-6;

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) {
        throw std::invalid_argument(std::string("harvester parameter '") + field + "' " + what);
    }
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Closed-form asymptote C V_g^2 / 2, in picojoules.
double storage_scale_pj(const HarvesterParams& p) {
    const double c = capacitance(p);
    return 0.5 * c * p.generator_voltage_v * p.generator_voltage_v / kPico;
}

// Exponent increment per cycle, dQ / (V_g C).
double rate_per_cycle(const HarvesterParams& p) {
    return p.charge_per_cycle_pc * kPico / (p.generator_voltage_v * capacitance(p));
}

}  // namespace

void HarvesterParams::validate() const {
    require(positive_finite(generator_voltage_v), "generator_voltage_v", "must be positive");
    require(positive_finite(max_storage_pj), "max_storage_pj", "must be positive");
    require(positive_finite(charge_per_cycle_pc), "charge_per_cycle_pc", "must be positive");
    require(positive_finite(cycle_duration_s), "cycle_duration_s", "must be positive");
    require(positive_finite(turn_off_threshold_pj), "turn_off_threshold_pj", "must be positive");
    require(std::isfinite(turn_on_threshold_pj) && turn_on_threshold_pj >= 0.0,
            "turn_on_threshold_pj", "must be non-negative");
    require(turn_off_threshold_pj < max_storage_pj, "turn_off_threshold_pj",
            "must be below max_storage_pj");
    const double c = capacitance(*this);
    require(std::isfinite(c) && c > 0.0, "max_storage_pj", "yields a non-finite capacitance");
}

double HarvesterParams::effective_turn_on_pj() const {
    return std::max(turn_on_threshold_pj, turn_off_threshold_pj);
}

double capacitance(const HarvesterParams& params) {
    const double vg = params.generator_voltage_v;
    return 2.0 * params.max_storage_pj * kPico / (vg * vg);
}

double energy_at_cycle(std::int64_t n_cycle, const HarvesterParams& params) {
    if (n_cycle < 0) {
        throw std::domain_error("energy_at_cycle: negative cycle index");
    }
    const double charge_deficit = -std::expm1(-rate_per_cycle(params) * static_cast<double>(n_cycle));
    return storage_scale_pj(params) * charge_deficit * charge_deficit;
}

std::int64_t cycle_index(double energy_pj, const HarvesterParams& params) {
    if (!(energy_pj >= 0.0)) {
        throw std::domain_error("cycle_index: negative energy");
    }
    if (energy_pj >= params.max_storage_pj) {
        throw SaturationError("cycle_index: storage saturated, cycle index diverges");
    }
    const double fill = std::sqrt(energy_pj / storage_scale_pj(params));
    if (fill >= 1.0) {
        throw SaturationError("cycle_index: storage saturated, cycle index diverges");
    }
    const double raw = -std::log1p(-fill) / rate_per_cycle(params);
    const double nearest = std::round(raw);
    if (std::abs(raw - nearest) < kCycleSnap) {
        return static_cast<std::int64_t>(nearest);
    }
    return static_cast<std::int64_t>(std::ceil(raw));
}

EnergyState make_state(double energy_pj, const HarvesterParams& params) {
    const double e = std::clamp(energy_pj, 0.0, params.max_storage_pj);
    return {e, e >= params.turn_off_threshold_pj};
}

EnergyState harvest(EnergyState state, double elapsed_s, const HarvesterParams& params) {
    const auto cycles = static_cast<std::int64_t>(std::floor(elapsed_s / params.cycle_duration_s + 1e-9));
    if (cycles <= 0 || state.energy_pj >= params.max_storage_pj) {
        return state;
    }
    const std::int64_t n = cycle_index(state.energy_pj, params) + cycles;
    // The ceiling in cycle_index can land on a cycle below the current level
    // only through rounding; harvesting never drains.
    const double next = std::min(energy_at_cycle(n, params), params.max_storage_pj);
    state.energy_pj = std::max(state.energy_pj, next);
    if (!state.operational && state.energy_pj >= params.effective_turn_on_pj()) {
        state.operational = true;
    }
    return state;
}

EnergyState consume(EnergyState state, double amount_pj, const HarvesterParams& params) {
    state.energy_pj = std::max(0.0, state.energy_pj - amount_pj);
    if (state.energy_pj < params.turn_off_threshold_pj) {
        state.operational = false;
    }
    return state;
}

bool can_afford(const EnergyState& state, double amount_pj) {
    return state.operational && state.energy_pj >= amount_pj;
}

}  // namespace thzloc::energy
