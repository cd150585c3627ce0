#pragma once

#include "pcf/dynamics.hpp"
#include "pcf/grid.hpp"
#include "pcf/soliton.hpp"

#include <string>
#include <vector>

namespace pcf {

enum class RunMode { perturbation, full };

struct Tolerances {
    double conservation_tol = 1e-6;  // relative
    double exterior_tol = 1e-8;      // times E_total(0)
    double boundary_tol = 1e-10;
    double lambda_floor = 0.05;

    bool operator==(const Tolerances&) const = default;
};

struct SweepRanges {
    std::vector<double> delta_scale;
    std::vector<double> epsilon;
    int workers = 0;  // 0: hardware concurrency

    bool operator==(const SweepRanges&) const = default;
};

struct RunConfig {
    std::string scenario = "custom";
    RunMode mode = RunMode::perturbation;
    SolitonParams soliton;
    PerturbationBumps perturbation;
    double delta_scale = 0.0;
    Grid1D grid;
    double t_end = 1.0;
    int cadence = 16;
    int snapshot_every = 0;  // records between field snapshots, 0 = none
    double eta = 0.25;
    double R_exterior = 10.0;
    double v_window = 0.0;
    double virial_width = 1.0;
    std::string output_dir = "out";
    Tolerances tolerances;
    SweepRanges sweep;

    bool operator==(const RunConfig&) const = default;
};

// ConfigError on malformed input, unknown keys or violated invariants.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);
void validate(const RunConfig& config);

std::string to_string(RunMode mode);

} // namespace pcf
