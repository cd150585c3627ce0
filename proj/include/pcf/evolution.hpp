#pragma once

#include "pcf/diagnostics.hpp"
#include "pcf/dynamics.hpp"

#include <functional>
#include <variant>

namespace pcf {

struct EvolutionSettings {
    double t_end = 0.0;
    int cadence = 1;           // steps between emitted records
    double eta = 0.25;
    double R_exterior = 10.0;
    double v_window = 0.0;
    double decay_delta = 1.0;  // normalization of the pointwise decay ratio
    VirialCutoffs cutoffs = VirialCutoffs::diamond(10.0);
    StepOptions step;
    int flux_stride = 4;
    bool diagnostics = true;   // false: plain time stepping, no records
};

using Snapshot = std::variant<FullState, PerturbationState>;
using RecordSink = std::function<void(const DiagnosticsRecord&, const Snapshot&)>;

// Every record except the virial columns, computed from a perturbation view.
DiagnosticsRecord compute_record(const PerturbationState& view, const Grid1D& grid, const SolitonField& field,
                                 const EvolutionSettings& settings);

// Step size sequence: full steps of grid.dt(), a shortened last step only
// when t_end is not hit within a 1e-9*dt slack.
double next_step_size(double t, double t_end, double dt);

// Evolve to settings.t_end.  Records are emitted at step 0, every `cadence`
// steps and at the final level.  Errors thrown by a step carry the time of
// the level that failed to advance.
FullState evolve(const FullState& initial, const SolitonParams& reference, const Grid1D& grid,
                 const EvolutionSettings& settings, const RecordSink& sink = {});
PerturbationState evolve(const PerturbationState& initial, const Grid1D& grid, const EvolutionSettings& settings,
                         const RecordSink& sink = {});

} // namespace pcf
