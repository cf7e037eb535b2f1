#include "thzloc/config.hpp"

#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace thzloc::cli {

namespace {

using nlohmann::json;
using Setter = std::function<void(sim::SimConfig&, const json&, const std::filesystem::path&)>;

double as_number(const std::string& key, const json& v) {
    if (!v.is_number()) throw ConfigError(key, "config key '" + key + "' must be a number");
    return v.get<double>();
}

std::int64_t as_integer(const std::string& key, const json& v) {
    if (!v.is_number_integer()) throw ConfigError(key, "config key '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

bool as_bool(const std::string& key, const json& v) {
    if (!v.is_boolean()) throw ConfigError(key, "config key '" + key + "' must be true or false");
    return v.get<bool>();
}

template <typename F>
Setter field(F assign) {
    return [assign](sim::SimConfig& c, const json& v, const std::filesystem::path&) {
        assign(c, v);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        // topology
        {"grid_rows", field([](auto& c, const json& v) { c.topology.grid_rows = static_cast<int>(as_integer("grid_rows", v)); })},
        {"grid_cols", field([](auto& c, const json& v) { c.topology.grid_cols = static_cast<int>(as_integer("grid_cols", v)); })},
        {"spacing_m", field([](auto& c, const json& v) { c.topology.spacing_m = as_number("spacing_m", v); })},
        // harvester
        {"generator_voltage_v", field([](auto& c, const json& v) { c.harvester.generator_voltage_v = as_number("generator_voltage_v", v); })},
        {"max_storage_pj", field([](auto& c, const json& v) { c.harvester.max_storage_pj = as_number("max_storage_pj", v); })},
        {"charge_per_cycle_pc", field([](auto& c, const json& v) { c.harvester.charge_per_cycle_pc = as_number("charge_per_cycle_pc", v); })},
        {"cycle_duration_s", field([](auto& c, const json& v) { c.harvester.cycle_duration_s = as_number("cycle_duration_s", v); })},
        {"turn_off_threshold_pj", field([](auto& c, const json& v) { c.harvester.turn_off_threshold_pj = as_number("turn_off_threshold_pj", v); })},
        {"turn_on_threshold_pj", field([](auto& c, const json& v) { c.harvester.turn_on_threshold_pj = as_number("turn_on_threshold_pj", v); })},
        {"initial_energy_pj", field([](auto& c, const json& v) { c.initial_energy_pj = as_number("initial_energy_pj", v); })},
        // radio
        {"energy_rx_pulse_pj", field([](auto& c, const json& v) { c.radio.energy_rx_pulse_pj = as_number("energy_rx_pulse_pj", v); })},
        {"energy_tx_pulse_pj", field([](auto& c, const json& v) { c.radio.energy_tx_pulse_pj = as_number("energy_tx_pulse_pj", v); })},
        {"packet_bits", field([](auto& c, const json& v) { c.radio.packet_bits = static_cast<int>(as_integer("packet_bits", v)); })},
        // channel
        {"transmit_power_dbm", field([](auto& c, const json& v) { c.channel.transmit_power_dbm = as_number("transmit_power_dbm", v); })},
        {"frequency_hz", field([](auto& c, const json& v) { c.channel.frequency_hz = as_number("frequency_hz", v); })},
        {"bandwidth_hz", field([](auto& c, const json& v) { c.channel.bandwidth_hz = as_number("bandwidth_hz", v); })},
        {"receiver_sensitivity_dbm", field([](auto& c, const json& v) { c.channel.receiver_sensitivity_dbm = as_number("receiver_sensitivity_dbm", v); })},
        {"absorption_table", [](sim::SimConfig& c, const json& v, const std::filesystem::path& base) {
             if (!v.is_string()) throw ConfigError("absorption_table", "config key 'absorption_table' must be a path string");
             std::filesystem::path p = v.get<std::string>();
             if (p.is_relative() && !base.empty()) p = base / p;
             try {
                 c.channel.absorption = channel::AbsorptionTable::load_csv(p);
             } catch (const channel::ConfigurationError& e) {
                 throw ConfigError("absorption_table", std::string("config key 'absorption_table': ") + e.what());
             }
         }},
        // run control
        {"update_period_s", field([](auto& c, const json& v) { c.update_period_s = as_number("update_period_s", v); })},
        {"iterations", field([](auto& c, const json& v) {
             const auto n = as_integer("iterations", v);
             if (n < 1 || n > std::numeric_limits<int>::max()) throw ConfigError("iterations", "config key 'iterations' must be at least 1");
             c.iterations = static_cast<int>(n);
         })},
        {"rng_seed", field([](auto& c, const json& v) {
             if (!v.is_number_unsigned()) throw ConfigError("rng_seed", "config key 'rng_seed' must be a non-negative integer");
             c.rng_seed = v.get<std::uint64_t>();
         })},
        {"threads", field([](auto& c, const json& v) {
             const auto n = as_integer("threads", v);
             if (n < 1) throw ConfigError("threads", "config key 'threads' must be at least 1");
             c.threads = static_cast<unsigned>(n);
         })},
        {"mobility_resample", field([](auto& c, const json& v) { c.mobility_resample = as_bool("mobility_resample", v); })},
        {"gauss_newton_refinement", field([](auto& c, const json& v) { c.gauss_newton_refinement = as_bool("gauss_newton_refinement", v); })},
    };
    return table;
}

// Recovers the key named in a validation message: the first quoted key,
// else the first key mentioned anywhere.
std::string key_in(const std::string& message) {
    const auto open = message.find('\'');
    if (open != std::string::npos) {
        const auto close = message.find('\'', open + 1);
        if (close != std::string::npos) {
            const auto quoted = message.substr(open + 1, close - open - 1);
            if (setters().contains(quoted)) return quoted;
        }
    }
    std::size_t best = std::string::npos;
    std::string found;
    for (const auto& [key, _] : setters()) {
        const auto at = message.find(key);
        if (at < best) {
            best = at;
            found = key;
        }
    }
    return found;
}

}  // namespace

sim::SimConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) {
        throw ConfigError("", "config must be a JSON object");
    }
    sim::SimConfig config;
    for (const auto& [key, value] : doc.items()) {
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError(key, "unknown config key '" + key + "'");
        }
        it->second(config, value, base_dir);
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key_in(e.what()), std::string("invalid config: ") + e.what());
    } catch (const channel::ConfigurationError& e) {
        throw ConfigError(key_in(e.what()), std::string("invalid config: ") + e.what());
    }
    return config;
}

sim::SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    json doc = json::object();
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("", path.string() + ": " + e.what());
        }
    }
    try {
        return config_from_json(doc, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(e.key(), path.string() + ": " + e.what());
    }
}

}  // namespace thzloc::cli
