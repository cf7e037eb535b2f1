#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace thzloc::channel {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Molecular absorption coefficient k(f) in 1/m, sampled at increasing
/// frequencies and linearly interpolated between samples.
class AbsorptionTable {
public:
    struct Sample {
        double frequency_hz;
        double k_per_m;
    };

    /// Lossless medium: k = 0 everywhere.
    AbsorptionTable();
    explicit AbsorptionTable(std::vector<Sample> samples);

    /// Reads the `frequency_hz,k_per_m` CSV format.
    static AbsorptionTable load_csv(const std::filesystem::path& path);

    std::span<const Sample> samples() const { return samples_; }

private:
    std::vector<Sample> samples_;
};

struct ChannelParams {
    double transmit_power_dbm = -20.0;
    double frequency_hz = 1e12;
    double bandwidth_hz = 1e12;
    double receiver_sensitivity_dbm = -100.0;
    AbsorptionTable absorption;

    void validate() const;
};

struct LinkBudgetResult {
    double received_power_dbm;
    double spreading_loss_dB;
    double absorption_loss_dB;
    bool received;
};

/// Piecewise-linear lookup, clamped to the endpoint values outside the table.
double absorption_coefficient(double frequency_hz, const AbsorptionTable& table);

/// Received power after absorption and spreading losses over `distance_m`.
/// Throws std::domain_error for non-positive distances.
LinkBudgetResult received_power(const ChannelParams& params, double distance_m);

/// Ranging resolution c / B in meters.
double raw_resolution(double bandwidth_hz);

}  // namespace thzloc::channel
