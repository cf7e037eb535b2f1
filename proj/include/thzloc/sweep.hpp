#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "thzloc/sim.hpp"

namespace thzloc::cli {

enum class SweepParameter { frequency_hz, charge_per_cycle_pc, update_period_s, bandwidth_hz, spacing_m, sensitivity_dbm };

std::string_view to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::bandwidth_hz;
    std::vector<double> values;        // ascending
    std::vector<std::uint64_t> seeds;  // one simulation per (value, seed)

    void validate() const;
};

/// {"parameter": "...", "values": [...], "seeds": [...]}. Missing seeds
/// default to `default_seed`.
SweepSpec sweep_from_json(const nlohmann::json& doc, std::uint64_t default_seed);
SweepSpec load_sweep(const std::filesystem::path& path, std::uint64_t default_seed);

/// Sets the swept quantity on a copy of `config`.
sim::SimConfig apply_parameter(sim::SimConfig config, SweepParameter parameter, double value);

struct ResultRow {
    std::string parameter_name;
    double parameter_value = 0.0;
    std::uint64_t seed = 0;
    double mean_error_m = 0.0;
    double p90_error_m = 0.0;
    double availability = 0.0;
    std::size_t attempts = 0;
    std::size_t successes = 0;
};

ResultRow make_row(std::string parameter_name, double parameter_value, std::uint64_t seed,
                   const sim::TrialReport& report);

/// One simulation per (value, seed) in that order. The swept config takes the
/// listed seed as its rng_seed, so every value of the sweep sees the same
/// random streams for a given seed. A failing point aborts with a ConfigError
/// that names it.
std::vector<ResultRow> run_sweep(const sim::SimConfig& config, const SweepSpec& sweep);

}  // namespace thzloc::cli
