#pragma once

#include "pcf/config.hpp"
#include "pcf/evolution.hpp"

#include <json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace pcf {

struct SimulationResult {
    std::vector<DiagnosticsRecord> records;
    bool ok = true;
    std::string error_kind;
    std::string error;
    double fail_time = std::numeric_limits<double>::quiet_NaN();
};

EvolutionSettings settings_from(const RunConfig& config);

// Builds the initial data and evolves it; library errors are captured in
// the result instead of propagating.  `sink` sees every emitted record.
SimulationResult run_simulation(const RunConfig& config, const RecordSink& sink = {});

// CSV helpers: fixed column order, 17 significant digits, "nan" for undefined.
std::string format_number(double v);
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);

// Summary of a run against its t=0 values (the body of report.json).
nlohmann::json summarize(const RunConfig& config, const SimulationResult& result);

std::string error_kind(const std::exception& e);

// Commands.  Return process exit codes: 0 ok, 1 runtime failure, 2 config error.
int cmd_verify(const RunConfig& config, const std::string& out_dir);
int cmd_simulate(const RunConfig& config, const std::string& out_dir);
int cmd_sweep(const RunConfig& config, const std::string& out_dir);
int cmd_diagnose(const RunConfig& config, const std::string& out_dir);

// Full command-line entry point: pcf verify|simulate|sweep|diagnose --config <path> [--out <dir>].
int run_cli(int argc, char** argv);

} // namespace pcf
