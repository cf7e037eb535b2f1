#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "thzloc/channel.hpp"
#include "thzloc/energy.hpp"
#include "thzloc/rng.hpp"

namespace thzloc::ranging {

/// Per-pulse energy costs at the nanonode and the operational packet length.
struct RadioParams {
    double energy_rx_pulse_pj = 0.1;
    double energy_tx_pulse_pj = 1.0;
    int packet_bits = 8;

    void validate() const;
};

enum class RangeFailure { none, node_energy_depleted, link_infeasible };

const char* to_string(RangeFailure f);

struct RangeMeasurement {
    std::size_t controller_id = 0;
    // Noisy estimate; may be negative for a node sitting next to a controller.
    std::optional<double> estimated_distance_m;
    RangeFailure failure = RangeFailure::none;

    bool ok() const { return failure == RangeFailure::none; }
};

struct ExchangeResult {
    RangeMeasurement measurement;
    energy::EnergyState energy;
};

struct RangeMeasurementSet {
    std::vector<RangeMeasurement> measurements;
    energy::EnergyState energy;

    bool complete() const;
    std::size_t successes() const;
};

/// Everything an exchange needs besides the geometry and the node state.
struct LinkContext {
    const channel::ChannelParams& channel;
    const RadioParams& radio;
    const energy::HarvesterParams& harvester;
};

/// One two-way time-of-flight exchange between a controller and the node.
///
/// Checks run in this order: node operational, controller->node link,
/// node can pay for reception (then debited), node can pay for the
/// retransmission (then debited), node->controller link. The first failing
/// check names the failure; pulses already handled stay debited. On success
/// the estimate is the true distance plus N(0, (c/B)^2) drawn from `rng`.
ExchangeResult exchange(std::size_t controller_id, double true_distance_m, const LinkContext& link,
                        energy::EnergyState energy, Rng& rng);

/// Runs exchange() against every controller in id order, threading the node
/// energy through. At least four controllers are required.
RangeMeasurementSet measure_all(const Eigen::Vector3d& node, std::span<const Eigen::Vector3d> controllers,
                                const LinkContext& link, energy::EnergyState energy, Rng& rng);

}  // namespace thzloc::ranging
