#pragma once

#include <cstdint>
#include <stdexcept>

namespace thzloc::energy {

/// Piezoelectric nanowire harvester and storage capacitor of a nanonode.
///
/// Energies are kept in picojoules, charge in picocoulombs. The storage
/// capacitance is implied by the generator voltage and the storage limit.
struct HarvesterParams {
    double generator_voltage_v = 0.42;
    double max_storage_pj = 800.0;
    double charge_per_cycle_pc = 6.0;
    double cycle_duration_s = 0.020;
    double turn_off_threshold_pj = 10.0;
    // A turn-on value below the turn-off threshold collapses the hysteresis
    // band to the turn-off threshold (see effective_turn_on_pj()).
    double turn_on_threshold_pj = 0.0;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    double effective_turn_on_pj() const;
};

struct EnergyState {
    double energy_pj = 0.0;
    bool operational = false;

    friend bool operator==(const EnergyState&, const EnergyState&) = default;
};

/// Raised by cycle_index() when the storage is full and the cycle count diverges.
class SaturationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Storage capacitance in farads, 2 E_max / V_g^2.
double capacitance(const HarvesterParams& params);

/// Energy stored after `n_cycle` harvesting cycles starting from empty storage.
double energy_at_cycle(std::int64_t n_cycle, const HarvesterParams& params);

/// Smallest cycle count whose closed-form energy reaches `energy_pj`.
///
/// Inverse of energy_at_cycle(): cycle_index(energy_at_cycle(k)) == k.
/// Throws SaturationError for energy_pj >= max storage and std::domain_error
/// for negative energy.
std::int64_t cycle_index(double energy_pj, const HarvesterParams& params);

/// Initial state for a node holding `energy_pj`; operational iff not below turn-off.
EnergyState make_state(double energy_pj, const HarvesterParams& params);

/// Advances whole harvesting cycles contained in `elapsed_s`. The fractional
/// remainder of a cycle is dropped.
EnergyState harvest(EnergyState state, double elapsed_s, const HarvesterParams& params);

/// Debits `amount_pj`, clamping at zero. Dropping below the turn-off threshold
/// switches the node off.
EnergyState consume(EnergyState state, double amount_pj, const HarvesterParams& params);

bool can_afford(const EnergyState& state, double amount_pj);

}  // namespace thzloc::energy
