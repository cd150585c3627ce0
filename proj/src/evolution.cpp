#include "pcf/evolution.hpp"

#include "pcf/errors.hpp"

#include <cmath>
#include <deque>
#include <optional>

namespace pcf {

namespace {

constexpr double time_slack = 1e-9;

DiagnosticsRecord record_from(const PerturbationState& view, const Grid1D& grid, const SolitonField& field,
                              const EvolutionSettings& s, const Totals& tot) {
    DiagnosticsRecord r;
    r.t = view.time;
    r.E_total = tot.E_total;
    r.P_total = tot.P_total;
    r.crossed = tot.crossed;
    r.ehat_total = tot.ehat_total;
    const ExteriorEnergy ext = exterior_energy(view, grid, field, s.R_exterior);
    r.exterior_R = ext.value;
    r.exterior_empty = ext.empty_region;
    if (view.time >= window_t_min) r.window_v = window_energy(view, grid, field, s.v_window);
    r.norms = weighted_norms(view, grid, s.eta);
    r.decay_ratio = pointwise_decay_monitor(view, grid, s.eta, s.decay_delta).max();
    r.sinh_bounds = sinh_bounds_monitor(view, grid, field);
    return r;
}

struct PerturbationOps {
    const Grid1D& grid;
    const EvolutionSettings& settings;
    SolitonCache cache;

    PerturbationState advance(const PerturbationState& y, double h) {
        return step(y, grid, h, cache, settings.step);
    }
    const SolitonField& field(double t) { return cache.at(t); }
    PerturbationState view(const PerturbationState& y, const SolitonField&) { return y; }
    Totals totals_of(const PerturbationState& y, const SolitonField& f) { return totals(y, grid, f); }
};

struct FullOps {
    const Grid1D& grid;
    const EvolutionSettings& settings;
    SolitonParams params;
    FarField far;
    SolitonCache cache;

    FullState advance(const FullState& y, double h) { return step(y, grid, h, far, settings.step); }
    const SolitonField& field(double t) { return cache.at(t); }
    PerturbationState view(const FullState& y, const SolitonField& f) { return perturbation_from_full(y, params, f); }
    Totals totals_of(const FullState& y, const SolitonField& f) { return totals(y, grid, f); }
};

template <class State, class Ops>
State run(const State& initial, const Grid1D& grid, const EvolutionSettings& s, const RecordSink& sink, Ops& ops) {
    if (!(s.t_end >= initial.time)) throw DomainError("t_end must not precede the initial time");
    if (s.cadence < 1) throw DomainError("cadence must be >= 1");
    const double dt = grid.dt();

    struct Level {
        long index;
        PerturbationState view;
        SolitonField field;
    };
    struct Pending {
        long index;
        DiagnosticsRecord record;
        Snapshot snapshot;
    };
    std::deque<Level> hist;
    std::deque<Pending> pending;
    std::optional<FluxAccumulator> flux;
    if (s.diagnostics) flux.emplace(grid, s.eta, initial.time, s.flux_stride);

    auto find = [&](long idx) -> const Level* {
        for (const Level& l : hist)
            if (l.index == idx) return &l;
        return nullptr;
    };
    auto emit = [&](Pending& p, const Level* a, const Level* b, const Level* c, std::size_t eval) {
        if (a && b && c) {
            TrajectoryWindow w;
            w.levels = {&a->view, &b->view, &c->view};
            w.fields = {&a->field, &b->field, &c->field};
            w.eval_index = eval;
            const VirialReport vr = virial_report(w, grid, s.cutoffs);
            p.record.virial_max = vr.max_norm();
            p.record.virial_l2 = vr.l2_norm();
        }
        if (sink) sink(p.record, p.snapshot);
    };
    auto flush = [&](bool at_end) {
        while (!pending.empty()) {
            Pending& p = pending.front();
            const long k = p.index;
            if (const Level *prev = find(k - 1), *next = find(k + 1); prev && next) {
                emit(p, prev, find(k), next, 1);
            } else if (k == 0 && find(1) && find(2)) {
                emit(p, find(0), find(1), find(2), 0);
            } else if (at_end) {
                const Level *a = find(k - 2), *b = find(k - 1);
                emit(p, a, b, find(k), 2);
            } else {
                break;
            }
            pending.pop_front();
        }
    };
    auto on_level = [&](long k, const State& y, bool last) {
        if (!s.diagnostics) return;
        const SolitonField& f = ops.field(y.time);
        Level lv{k, ops.view(y, f), f};
        if (k == 0)
            flux->start(lv.view);
        else
            flux->advance(lv.view);
        if (k % s.cadence == 0 || last) {
            Pending p{k, record_from(lv.view, grid, lv.field, s, ops.totals_of(y, f)), Snapshot(y)};
            flux->fill(p.record.norms);
            pending.push_back(std::move(p));
        }
        hist.push_back(std::move(lv));
        if (hist.size() > 3) hist.pop_front();
        flush(false);
    };

    State y = initial;
    long k = 0;
    bool last = next_step_size(y.time, s.t_end, dt) == 0.0;
    on_level(0, y, last);
    while (!last) {
        const double h = next_step_size(y.time, s.t_end, dt);
        try {
            y = ops.advance(y, h);
        } catch (Error& e) {
            e.attach_time(y.time);
            throw;
        }
        ++k;
        if (std::abs(y.time - s.t_end) <= time_slack * dt) y.time = s.t_end;
        last = next_step_size(y.time, s.t_end, dt) == 0.0;
        on_level(k, y, last);
    }
    if (s.diagnostics) flush(true);
    return y;
}

} // namespace

DiagnosticsRecord compute_record(const PerturbationState& view, const Grid1D& grid, const SolitonField& field,
                                 const EvolutionSettings& settings) {
    return record_from(view, grid, field, settings, totals(view, grid, field));
}

double next_step_size(double t, double t_end, double dt) {
    const double rem = t_end - t;
    if (rem <= time_slack * dt) return 0.0;
    if (rem >= dt * (1.0 - time_slack)) return dt;
    return rem;
}

FullState evolve(const FullState& initial, const SolitonParams& reference, const Grid1D& grid,
                 const EvolutionSettings& settings, const RecordSink& sink) {
    FullOps ops{grid, settings, reference, far_field_of(reference), SolitonCache(reference, grid)};
    return run(initial, grid, settings, sink, ops);
}

PerturbationState evolve(const PerturbationState& initial, const Grid1D& grid, const EvolutionSettings& settings,
                         const RecordSink& sink) {
    PerturbationOps ops{grid, settings, SolitonCache(initial.params, grid)};
    return run(initial, grid, settings, sink, ops);
}

} // namespace pcf
