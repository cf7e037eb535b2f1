#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "thzloc/sim.hpp"

namespace thzloc::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}

    /// Offending key, empty when the problem is not tied to one.
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Applies the keys of a flat JSON object on top of the defaults. Relative
/// absorption-table paths resolve against `base_dir`.
sim::SimConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads a JSON config file. An empty (or whitespace-only) file yields the
/// defaults. Throws ConfigError on I/O, parse or validation failures.
sim::SimConfig load_config(const std::filesystem::path& path);

}  // namespace thzloc::cli
