#pragma once

// Command dispatch and result emission (table, csv, jsonl).

#include "orbitdeg/config.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace orbitdeg {

/// Command-line overrides applied on top of the config.
struct RunOptions {
    std::optional<std::size_t> n_max;
    std::optional<double> epsilon;
    std::optional<double> tol;
    std::uint64_t seed = 42;
};

struct RunReport {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;

    // Per-level data: one row per (point, n); becomes the csv body and one
    // jsonl record per non-key cell.
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
    std::size_t key_columns = 0; // leading columns identifying a row ("point", "n")

    // Summary records, each an object with at least quantity, n, value.
    std::vector<nlohmann::json> records;

    bool checks_failed = false;
    double wall_ms = 0.0;

    int exit_code() const noexcept { return checks_failed ? 1 : 0; }
};

const std::vector<std::string>& command_names();

/// Throws ConfigError for an unknown command or one the config kind cannot
/// serve, ComputationError (and subclasses) from the computations.
RunReport run_command(const std::string& cmd, const SystemConfig& config, const RunOptions& opts = {});

/// x rounded to 15 significant digits (the value that "%.15g" prints).
double round15(double x);

void emit(const RunReport& report, const std::string& format, std::ostream& out);
/// Empty path writes to standard output; InputError if the file cannot be opened.
void emit(const RunReport& report, const std::string& format, const std::string& path);

/// The jsonl record for an error, with kind "config" or "computation".
nlohmann::json error_record(const std::string& kind, const std::string& message);

} // namespace orbitdeg
