#include "thzloc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace thzloc::channel {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigurationError(where + ": not a number: '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw ConfigurationError(where + ": not a finite number: '" + text + "'");
    }
    return v;
}

}  // namespace

AbsorptionTable::AbsorptionTable() : samples_{{1e12, 0.0}} {}

AbsorptionTable::AbsorptionTable(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw ConfigurationError("absorption table is empty");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.frequency_hz) || s.frequency_hz <= 0.0) {
            throw ConfigurationError("absorption table: frequency must be positive");
        }
        if (!std::isfinite(s.k_per_m) || s.k_per_m < 0.0) {
            throw ConfigurationError("absorption table: coefficient must be non-negative");
        }
        if (i > 0 && !(s.frequency_hz > samples_[i - 1].frequency_hz)) {
            throw ConfigurationError("absorption table: frequencies must be strictly increasing");
        }
    }
}

AbsorptionTable AbsorptionTable::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigurationError("cannot open absorption table: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || trim(line) != "frequency_hz,k_per_m") {
        throw ConfigurationError(path.string() + ": expected header 'frequency_hz,k_per_m'");
    }
    std::vector<Sample> samples;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ConfigurationError(where + ": expected two columns");
        }
        samples.push_back({parse_number(trim(line.substr(0, comma)), where),
                           parse_number(trim(line.substr(comma + 1)), where)});
    }
    return AbsorptionTable(std::move(samples));
}

void ChannelParams::validate() const {
    if (!std::isfinite(frequency_hz) || frequency_hz <= 0.0) {
        throw ConfigurationError("channel parameter 'frequency_hz' must be positive");
    }
    if (!std::isfinite(bandwidth_hz) || bandwidth_hz <= 0.0) {
        throw ConfigurationError("channel parameter 'bandwidth_hz' must be positive");
    }
    if (!std::isfinite(transmit_power_dbm)) {
        throw ConfigurationError("channel parameter 'transmit_power_dbm' must be finite");
    }
    // -inf is accepted as "receive everything".
    if (std::isnan(receiver_sensitivity_dbm) || receiver_sensitivity_dbm == HUGE_VAL) {
        throw ConfigurationError("channel parameter 'receiver_sensitivity_dbm' must be a dBm value");
    }
}

double absorption_coefficient(double frequency_hz, const AbsorptionTable& table) {
    const auto s = table.samples();
    if (s.empty()) {
        throw ConfigurationError("absorption table is empty");
    }
    if (frequency_hz <= s.front().frequency_hz) return s.front().k_per_m;
    if (frequency_hz >= s.back().frequency_hz) return s.back().k_per_m;
    const auto upper = std::upper_bound(s.begin(), s.end(), frequency_hz,
                                        [](double f, const auto& sample) { return f < sample.frequency_hz; });
    const auto lower = upper - 1;
    const double t = (frequency_hz - lower->frequency_hz) / (upper->frequency_hz - lower->frequency_hz);
    return lower->k_per_m + t * (upper->k_per_m - lower->k_per_m);
}

LinkBudgetResult received_power(const ChannelParams& params, double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::domain_error("received_power: distance must be positive");
    }
    const double k = absorption_coefficient(params.frequency_hz, params.absorption);
    const double absorption_db = k * distance_m * 10.0 * std::log10(std::numbers::e);
    const double spreading_db =
        20.0 * std::log10(4.0 * std::numbers::pi * params.frequency_hz * distance_m / kSpeedOfLight);
    const double rx = params.transmit_power_dbm - absorption_db - spreading_db;
    return {rx, spreading_db, absorption_db, rx >= params.receiver_sensitivity_dbm};
}

double raw_resolution(double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) {
        throw std::domain_error("raw_resolution: bandwidth must be positive");
    }
    return kSpeedOfLight / bandwidth_hz;
}

}  // namespace thzloc::channel
