#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "thzloc/sweep.hpp"

namespace thzloc::cli {

enum class OutputFormat { csv, json };

inline constexpr std::string_view kCsvHeader =
    "parameter_name,parameter_value,seed,mean_error_m,p90_error_m,availability,attempts,successes";

void write_csv(std::span<const ResultRow> rows, std::ostream& out);
void write_json(std::span<const ResultRow> rows, std::ostream& out);
/// Fixed-width table in millimeters and percent for a terminal.
void write_summary(std::span<const ResultRow> rows, std::ostream& out);

std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_json(std::istream& in);

/// Writes `rows` to `path` in `format` and the summary table to `summary`.
/// Throws std::runtime_error when the file cannot be written.
void emit_results(std::span<const ResultRow> rows, const std::filesystem::path& path, OutputFormat format,
                  std::ostream& summary);

}  // namespace thzloc::cli
