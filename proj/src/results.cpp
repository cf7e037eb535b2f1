#include "thzloc/results.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace thzloc::cli {

namespace {

using nlohmann::json;

// %.17g round-trips every finite double.
std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    // strtod rather than stod: subnormals must parse, not throw.
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("results csv: bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) { return v.is_null() ? std::nan("") : v.get<double>(); }

}  // namespace

void write_csv(std::span<const ResultRow> rows, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.parameter_name << ',' << format_double(r.parameter_value) << ',' << r.seed << ','
            << format_double(r.mean_error_m) << ',' << format_double(r.p90_error_m) << ','
            << format_double(r.availability) << ',' << r.attempts << ',' << r.successes << '\n';
    }
}

void write_json(std::span<const ResultRow> rows, std::ostream& out) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"parameter_name", r.parameter_name},
                       {"parameter_value", number_or_null(r.parameter_value)},
                       {"seed", r.seed},
                       {"mean_error_m", number_or_null(r.mean_error_m)},
                       {"p90_error_m", number_or_null(r.p90_error_m)},
                       {"availability", number_or_null(r.availability)},
                       {"attempts", r.attempts},
                       {"successes", r.successes}});
    }
    out << arr.dump(2) << '\n';
}

void write_summary(std::span<const ResultRow> rows, std::ostream& out) {
    const auto flags = out.flags();
    out << std::left << std::setw(22) << "parameter" << std::right << std::setw(14) << "value" << std::setw(8)
        << "seed" << std::setw(12) << "mean [mm]" << std::setw(12) << "p90 [mm]" << std::setw(10) << "avail"
        << std::setw(12) << "successes" << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(22) << r.parameter_name << std::right << std::setw(14)
            << std::setprecision(6) << std::defaultfloat << r.parameter_value << std::setw(8) << r.seed
            << std::fixed << std::setprecision(4) << std::setw(12) << r.mean_error_m * 1e3 << std::setw(12)
            << r.p90_error_m * 1e3 << std::setprecision(2) << std::setw(9) << r.availability * 100.0 << '%'
            << std::setw(12) << r.successes << std::defaultfloat << '\n';
    }
    out.flags(flags);
}

std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("results csv: unexpected header");
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 8) throw std::runtime_error("results csv: expected 8 fields in '" + line + "'");
        rows.push_back({f[0], parse_double(f[1]), std::stoull(f[2]), parse_double(f[3]), parse_double(f[4]),
                        parse_double(f[5]), static_cast<std::size_t>(std::stoull(f[6])),
                        static_cast<std::size_t>(std::stoull(f[7]))});
    }
    return rows;
}

std::vector<ResultRow> read_json(std::istream& in) {
    const json doc = json::parse(in);
    if (!doc.is_array()) throw std::runtime_error("results json: expected an array");
    std::vector<ResultRow> rows;
    for (const auto& o : doc) {
        rows.push_back({o.at("parameter_name").get<std::string>(), number_from(o.at("parameter_value")),
                        o.at("seed").get<std::uint64_t>(), number_from(o.at("mean_error_m")),
                        number_from(o.at("p90_error_m")), number_from(o.at("availability")),
                        o.at("attempts").get<std::size_t>(), o.at("successes").get<std::size_t>()});
    }
    return rows;
}

void emit_results(std::span<const ResultRow> rows, const std::filesystem::path& path, OutputFormat format,
                  std::ostream& summary) {
    if (rows.empty()) throw std::invalid_argument("emit_results: no rows to write");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write results to " + path.string());
    if (format == OutputFormat::csv) {
        write_csv(rows, out);
    } else {
        write_json(rows, out);
    }
    out.flush();
    if (!out) throw std::runtime_error("error while writing " + path.string());
    write_summary(rows, summary);
}

}  // namespace thzloc::cli
