#include "thzloc/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "thzloc/config.hpp"

namespace thzloc::cli {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<SweepParameter, std::string_view>, 6> kNames{{
    {SweepParameter::frequency_hz, "frequency_hz"},
    {SweepParameter::charge_per_cycle_pc, "charge_per_cycle_pc"},
    {SweepParameter::update_period_s, "update_period_s"},
    {SweepParameter::bandwidth_hz, "bandwidth_hz"},
    {SweepParameter::spacing_m, "spacing_m"},
    {SweepParameter::sensitivity_dbm, "sensitivity_dbm"},
}};

std::string describe(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

std::string_view to_string(SweepParameter p) {
    for (const auto& [param, name] : kNames) {
        if (param == p) return name;
    }
    return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
    for (const auto& [param, n] : kNames) {
        if (n == name) return param;
    }
    return std::nullopt;
}

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("values", "sweep 'values' must not be empty");
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
        throw ConfigError("values", "sweep 'values' must be finite numbers");
    }
    if (!std::is_sorted(values.begin(), values.end())) {
        throw ConfigError("values", "sweep 'values' must be sorted ascending");
    }
    if (seeds.empty()) throw ConfigError("seeds", "sweep 'seeds' must not be empty");
}

SweepSpec sweep_from_json(const json& doc, std::uint64_t default_seed) {
    if (!doc.is_object()) throw ConfigError("", "sweep spec must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "parameter" && key != "values" && key != "seeds") {
            throw ConfigError(key, "unknown sweep key '" + key + "'");
        }
    }
    SweepSpec spec;
    if (!doc.contains("parameter") || !doc["parameter"].is_string()) {
        throw ConfigError("parameter", "sweep 'parameter' must be a string");
    }
    const auto name = doc["parameter"].get<std::string>();
    const auto param = parse_sweep_parameter(name);
    if (!param) throw ConfigError("parameter", "unknown sweep parameter '" + name + "'");
    spec.parameter = *param;

    if (!doc.contains("values") || !doc["values"].is_array()) {
        throw ConfigError("values", "sweep 'values' must be an array of numbers");
    }
    for (const auto& v : doc["values"]) {
        if (!v.is_number()) throw ConfigError("values", "sweep 'values' must be an array of numbers");
        spec.values.push_back(v.get<double>());
    }
    if (doc.contains("seeds")) {
        if (!doc["seeds"].is_array()) throw ConfigError("seeds", "sweep 'seeds' must be an array of integers");
        for (const auto& s : doc["seeds"]) {
            if (!s.is_number_unsigned()) {
                throw ConfigError("seeds", "sweep 'seeds' must be non-negative integers");
            }
            spec.seeds.push_back(s.get<std::uint64_t>());
        }
    } else {
        spec.seeds.push_back(default_seed);
    }
    spec.validate();
    return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path, std::uint64_t default_seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open sweep file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    try {
        return sweep_from_json(doc, default_seed);
    } catch (const ConfigError& e) {
        throw ConfigError(e.key(), path.string() + ": " + e.what());
    }
}

sim::SimConfig apply_parameter(sim::SimConfig config, SweepParameter parameter, double value) {
    switch (parameter) {
        case SweepParameter::frequency_hz: config.channel.frequency_hz = value; break;
        case SweepParameter::charge_per_cycle_pc: config.harvester.charge_per_cycle_pc = value; break;
        case SweepParameter::update_period_s: config.update_period_s = value; break;
        case SweepParameter::bandwidth_hz: config.channel.bandwidth_hz = value; break;
        case SweepParameter::spacing_m: config.topology.spacing_m = value; break;
        case SweepParameter::sensitivity_dbm: config.channel.receiver_sensitivity_dbm = value; break;
    }
    return config;
}

ResultRow make_row(std::string parameter_name, double parameter_value, std::uint64_t seed,
                   const sim::TrialReport& report) {
    return {std::move(parameter_name), parameter_value, seed,    report.mean_error_m,
            report.p90_error_m,        report.availability, report.attempts, report.successes};
}

std::vector<ResultRow> run_sweep(const sim::SimConfig& config, const SweepSpec& sweep) {
    sweep.validate();
    const std::string name(to_string(sweep.parameter));
    std::vector<ResultRow> rows;
    rows.reserve(sweep.values.size() * sweep.seeds.size());
    for (double value : sweep.values) {
        for (std::uint64_t seed : sweep.seeds) {
            auto point = apply_parameter(config, sweep.parameter, value);
            point.rng_seed = seed;
            sim::TrialReport report;
            try {
                report = sim::run_simulation(point);
            } catch (const std::exception& e) {
                throw ConfigError(name, "sweep point " + name + "=" + describe(value) + " seed=" +
                                            std::to_string(seed) + ": " + e.what());
            }
            rows.push_back(make_row(name, value, seed, report));
        }
    }
    return rows;
}

}  // namespace thzloc::cli
