#include "thzloc/ranging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thzloc::ranging {

void RadioParams::validate() const {
    if (!(std::isfinite(energy_rx_pulse_pj) && energy_rx_pulse_pj > 0.0)) {
        throw std::invalid_argument("radio parameter 'energy_rx_pulse_pj' must be positive");
    }
    if (!(std::isfinite(energy_tx_pulse_pj) && energy_tx_pulse_pj > 0.0)) {
        throw std::invalid_argument("radio parameter 'energy_tx_pulse_pj' must be positive");
    }
    if (packet_bits < 1) {
        throw std::invalid_argument("radio parameter 'packet_bits' must be at least 1");
    }
}

const char* to_string(RangeFailure f) {
    switch (f) {
        case RangeFailure::none: return "none";
        case RangeFailure::node_energy_depleted: return "node_energy_depleted";
        case RangeFailure::link_infeasible: return "link_infeasible";
    }
    return "unknown";
}

bool RangeMeasurementSet::complete() const {
    return std::all_of(measurements.begin(), measurements.end(), [](const auto& m) { return m.ok(); });
}

std::size_t RangeMeasurementSet::successes() const {
    return static_cast<std::size_t>(
        std::count_if(measurements.begin(), measurements.end(), [](const auto& m) { return m.ok(); }));
}

ExchangeResult exchange(std::size_t controller_id, double true_distance_m, const LinkContext& link,
                        energy::EnergyState energy, Rng& rng) {
    auto fail = [&](RangeFailure why) {
        return ExchangeResult{{controller_id, std::nullopt, why}, energy};
    };

    if (!energy.operational) {
        return fail(RangeFailure::node_energy_depleted);
    }
    if (!channel::received_power(link.channel, true_distance_m).received) {
        return fail(RangeFailure::link_infeasible);
    }
    if (!energy::can_afford(energy, link.radio.energy_rx_pulse_pj)) {
        return fail(RangeFailure::node_energy_depleted);
    }
    energy = energy::consume(energy, link.radio.energy_rx_pulse_pj, link.harvester);
    if (!energy::can_afford(energy, link.radio.energy_tx_pulse_pj)) {
        return fail(RangeFailure::node_energy_depleted);
    }
    energy = energy::consume(energy, link.radio.energy_tx_pulse_pj, link.harvester);
    // Controller and node transmit at the same power over a reciprocal
    // channel, so the outbound budget equals the inbound one checked above.

    std::normal_distribution<double> noise(0.0, channel::raw_resolution(link.channel.bandwidth_hz));
    return {{controller_id, true_distance_m + noise(rng), RangeFailure::none}, energy};
}

RangeMeasurementSet measure_all(const Eigen::Vector3d& node, std::span<const Eigen::Vector3d> controllers,
                                const LinkContext& link, energy::EnergyState energy, Rng& rng) {
    if (controllers.size() < 4) {
        throw std::invalid_argument("measure_all: at least four controllers are required");
    }
    RangeMeasurementSet out;
    out.measurements.reserve(controllers.size());
    for (std::size_t id = 0; id < controllers.size(); ++id) {
        auto r = exchange(id, (node - controllers[id]).norm(), link, energy, rng);
        energy = r.energy;
        out.measurements.push_back(r.measurement);
    }
    out.energy = energy;
    return out;
}

}  // namespace thzloc::ranging
