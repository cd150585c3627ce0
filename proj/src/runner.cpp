#include "pcf/runner.hpp"

#include "pcf/errors.hpp"
#include "pcf/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

namespace pcf {

using nlohmann::json;
namespace fs = std::filesystem;

EvolutionSettings settings_from(const RunConfig& c) {
    EvolutionSettings s;
    s.t_end = c.t_end;
    s.cadence = c.cadence;
    s.eta = c.eta;
    s.R_exterior = c.R_exterior;
    s.v_window = c.v_window;
    s.decay_delta = c.delta_scale > 0.0 ? c.delta_scale : 1.0;
    s.cutoffs = VirialCutoffs::diamond(c.R_exterior, c.virial_width, 1.0);
    s.step.lambda_floor = c.tolerances.lambda_floor;
    s.step.boundary_tol = c.tolerances.boundary_tol;
    return s;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const NumericalDomainError*>(&e)) return "NumericalDomainError";
    if (dynamic_cast<const SingularDenominator*>(&e)) return "SingularDenominator";
    if (dynamic_cast<const CoefficientSingularity*>(&e)) return "CoefficientSingularity";
    if (dynamic_cast<const BlowupDetected*>(&e)) return "BlowupDetected";
    if (dynamic_cast<const BoundaryContamination*>(&e)) return "BoundaryContamination";
    if (dynamic_cast<const SupportError*>(&e)) return "SupportError";
    if (dynamic_cast<const WindowUndefined*>(&e)) return "WindowUndefined";
    if (dynamic_cast<const InsufficientHistory*>(&e)) return "InsufficientHistory";
    return "Error";
}

SimulationResult run_simulation(const RunConfig& c, const RecordSink& sink) {
    SimulationResult res;
    auto collect = [&](const DiagnosticsRecord& r, const Snapshot& s) {
        res.records.push_back(r);
        if (sink) sink(r, s);
    };
    try {
        const InitialData data = build_initial_data(c.soliton, c.perturbation, c.delta_scale, c.grid);
        const EvolutionSettings s = settings_from(c);
        if (c.mode == RunMode::full)
            evolve(data.full, c.soliton, c.grid, s, collect);
        else
            evolve(data.perturbation, c.grid, s, collect);
    } catch (const Error& e) {
        res.ok = false;
        res.error_kind = error_kind(e);
        res.error = e.what();
        res.fail_time = e.time;
    }
    return res;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

const char* const csv_columns[] = {"t",       "E_total",   "P_total",     "crossed",  "exterior_R", "window_v",
                                   "E0",      "E1",        "Ebar0",       "Ebar1",    "F0",         "F1",
                                   "Fbar0",   "Fbar1",     "virial_max",  "virial_l2", "decay_ratio", "sinh_min",
                                   "sinh_max", "cosh_min", "cosh_max"};

std::vector<double> record_values(const DiagnosticsRecord& r) {
    return {r.t,
            r.E_total,
            r.P_total,
            r.crossed,
            r.exterior_R,
            r.window_v,
            r.norms.E0,
            r.norms.E1,
            r.norms.Ebar0,
            r.norms.Ebar1,
            r.norms.F0,
            r.norms.F1,
            r.norms.Fbar0,
            r.norms.Fbar1,
            r.virial_max,
            r.virial_l2,
            r.decay_ratio,
            r.sinh_bounds.sinh_min,
            r.sinh_bounds.sinh_max,
            r.sinh_bounds.cosh_min,
            r.sinh_bounds.cosh_max};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
    if (!out) throw Error("write failed for " + p.string());
}

void write_snapshot(const fs::path& dir, const Snapshot& snap, const Grid1D& grid) {
    std::string body;
    double t = 0.0;
    if (const auto* f = std::get_if<FullState>(&snap)) {
        t = f->time;
        body = "x,Lambda,Pi,phi,Psi\n";
        for (int i = 0; i < grid.n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            body += format_number(grid.x(i)) + "," + format_number(f->lambda[k]) + "," + format_number(f->pi[k]) +
                    "," + format_number(f->phi[k]) + "," + format_number(f->psi[k]) + "\n";
        }
    } else {
        const auto& p = std::get<PerturbationState>(snap);
        t = p.time;
        body = "x,z,w,s,m\n";
        for (int i = 0; i < grid.n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            body += format_number(grid.x(i)) + "," + format_number(p.z[k]) + "," + format_number(p.w[k]) + "," +
                    format_number(p.s[k]) + "," + format_number(p.m[k]) + "\n";
        }
    }
    char name[64];
    std::snprintf(name, sizeof name, "fields_t%.6f.csv", t);
    write_text(dir / name, body);
}

} // namespace

std::string csv_header() {
    std::string h;
    for (const char* c : csv_columns) {
        if (!h.empty()) h += ",";
        h += c;
    }
    return h + "\n";
}

std::string csv_row(const DiagnosticsRecord& r) {
    std::string line;
    for (double v : record_values(r)) {
        if (!line.empty()) line += ",";
        line += format_number(v);
    }
    return line + "\n";
}

json summarize(const RunConfig& c, const SimulationResult& res) {
    json j;
    j["scenario"] = c.scenario;
    j["mode"] = to_string(c.mode);
    j["status"] = res.ok ? "ok" : "failed";
    if (!res.ok) j["error"] = {{"kind", res.error_kind}, {"message", res.error}, {"time", number_or_null(res.fail_time)}};
    j["records"] = res.records.size();
    if (res.records.empty()) return j;

    const DiagnosticsRecord& r0 = res.records.front();
    j["t_final"] = res.records.back().t;

    json cols = json::object();
    const std::vector<double> v0 = record_values(r0);
    for (std::size_t k = 1; k < std::size(csv_columns); ++k) {
        double sup = -std::numeric_limits<double>::infinity();
        double first = std::numeric_limits<double>::quiet_NaN();
        for (const DiagnosticsRecord& r : res.records) {
            const double v = record_values(r)[k];
            if (!std::isfinite(v)) continue;
            if (std::isnan(first)) first = v;
            sup = std::max(sup, v);
        }
        json e;
        e["initial"] = number_or_null(v0[k]);
        e["first_defined"] = number_or_null(first);
        e["sup"] = number_or_null(sup);
        e["ratio_to_initial"] =
            (std::isfinite(v0[k]) && v0[k] != 0.0 && std::isfinite(sup)) ? json(sup / v0[k]) : json(nullptr);
        cols[csv_columns[k]] = e;
    }
    j["diagnostics"] = cols;

    double dE = 0, dP = 0, dC = 0, dExt = 0, sup_w = 0, sup_decay = 0, min_sinh = std::numeric_limits<double>::infinity();
    for (const DiagnosticsRecord& r : res.records) {
        dE = std::max(dE, std::abs(r.E_total - r0.E_total));
        dP = std::max(dP, std::abs(r.P_total - r0.P_total));
        dC = std::max(dC, std::abs(r.crossed - r0.crossed));
        dExt = std::max(dExt, r.exterior_R - r0.exterior_R);
        sup_w = std::max(sup_w, r.norms.surface_total());
        sup_decay = std::max(sup_decay, r.decay_ratio);
        min_sinh = std::min(min_sinh, r.sinh_bounds.sinh_min);
    }
    const double E0 = r0.E_total;
    const double eh0 = r0.ehat_total;
    const double crossed_rel = eh0 > 0.0 ? dC / eh0 : dC;
    j["E_drift_rel"] = E0 != 0.0 ? json(dE / std::abs(E0)) : json(dE);
    j["P_drift_rel_to_E"] = E0 != 0.0 ? json(dP / std::abs(E0)) : json(dP);
    j["crossed_drift_rel"] = crossed_rel;
    j["crossed_conserved"] = crossed_rel <= c.tolerances.conservation_tol;
    j["exterior_excess_rel"] = E0 != 0.0 ? json(dExt / std::abs(E0)) : json(dExt);
    j["exterior_stable"] = dExt <= c.tolerances.exterior_tol * std::abs(E0);
    const double w0 = r0.norms.surface_total();
    j["weighted_norm_initial"] = w0;
    j["weighted_norm_sup"] = sup_w;
    j["weighted_norm_ratio"] = w0 > 0.0 ? json(sup_w / w0) : json(nullptr);
    j["decay_ratio_initial"] = r0.decay_ratio;
    j["decay_ratio_sup"] = sup_decay;
    j["empirical_decay_constant"] = sup_decay;
    j["min_sinh"] = min_sinh;
    return j;
}

namespace {

fs::path prepare_dir(const std::string& out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + out_dir + ": " + ec.message());
    return dir;
}

int simulate_into(const RunConfig& c, const fs::path& dir, SimulationResult* out) {
    const fs::path csv_path = dir / "timeseries.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw Error("cannot write " + csv_path.string());
    csv << csv_header();
    csv.flush();
    std::size_t count = 0;
    auto sink = [&](const DiagnosticsRecord& r, const Snapshot& s) {
        const std::string line = csv_row(r);
        csv.write(line.data(), static_cast<std::streamsize>(line.size()));
        csv.flush();
        if (c.snapshot_every > 0 && count % static_cast<std::size_t>(c.snapshot_every) == 0)
            write_snapshot(dir, s, c.grid);
        ++count;
    };
    SimulationResult res = run_simulation(c, sink);
    csv.close();
    write_text(dir / "report.json", summarize(c, res).dump(2) + "\n");
    if (!res.ok) std::cerr << "simulation failed: " << res.error_kind << ": " << res.error << "\n";
    const int code = res.ok ? 0 : 1;
    if (out) *out = std::move(res);
    return code;
}

json report_json(const ConvergenceReport& r, bool passed, const std::string& note = "") {
    json j;
    j["name"] = r.name;
    j["resolutions"] = r.resolutions;
    j["errors"] = r.errors;
    j["fitted_order"] = number_or_null(r.fitted_order);
    j["reduction_factors"] = json::array();
    for (double f : r.reduction_factors()) j["reduction_factors"].push_back(number_or_null(f));
    j["passed"] = passed;
    if (!note.empty()) j["note"] = note;
    return j;
}

StepOptions step_options(const RunConfig& c) {
    return {c.tolerances.lambda_floor, c.tolerances.boundary_tol};
}

bool order_gate(const ConvergenceReport& r) { return r.all_zero() || (std::isfinite(r.fitted_order) && r.fitted_order >= 1.8); }

} // namespace

int cmd_verify(const RunConfig& c, const std::string& out_dir) {
    const fs::path dir = prepare_dir(out_dir);
    json checks = json::array();
    json failures = json::array();
    auto record = [&](const json& j) {
        checks.push_back(j);
        if (!j.at("passed").get<bool>()) failures.push_back(j.at("name"));
    };
    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            record({{"name", name}, {"passed", false}, {"error", {{"kind", error_kind(e)}, {"message", e.what()}}}});
        }
    };

    const std::vector<double> hs = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    SolitonParams flat = c.soliton;
    flat.epsilon = 0.0;

    guarded("soliton_pde_residual", [&] {
        const ConvergenceReport r = soliton_pde_residual(c.soliton, hs);
        const bool ok = c.soliton.epsilon == 0.0 ? r.all_zero() : order_gate(r);
        record(report_json(r, ok));
        for (SolitonForm f : {SolitonForm::printed_phase, SolitonForm::printed_phase_gamma1}) {
            const ConvergenceReport rv = soliton_pde_residual(c.soliton, hs, f);
            record(report_json(rv, true, "comparison only: the printed variant is not used in simulation"));
        }
        const ConvergenceReport rz = soliton_pde_residual(flat, hs);
        json jz = report_json(rz, rz.all_zero(), "epsilon = 0 must give an exactly zero residual");
        jz["name"] = "soliton_pde_residual[epsilon=0]";
        record(jz);
    });

    guarded("derivative_formula_check", [&] {
        const auto pts = random_interaction_points(c.soliton, 20, 20240601u, 2e-3);
        const ConvergenceReport r = derivative_formula_check(c.soliton, pts);
        record(report_json(r, c.soliton.epsilon == 0.0 ? r.all_zero() : order_gate(r)));
        const ConvergenceReport rz = derivative_formula_check(flat, pts);
        json jz = report_json(rz, rz.all_zero());
        jz["name"] = "derivative_formula_check[epsilon=0]";
        record(jz);
    });

    const std::vector<double> dxs = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    const ModeConsistencySetup setup = auto_domain_setup(c.soliton, c.perturbation, c.delta_scale, 5.0, step_options(c));
    guarded("mode_consistency", [&] {
        const ConvergenceReport r = mode_consistency(setup, dxs);
        record(report_json(r, order_gate(r)));
    });

    guarded("free_wave_oracle", [&] {
        FreeWaveSetup fw;
        const FarField far = far_field_of(c.soliton);
        fw.lambda_far = far.lambda;
        fw.phi_far = far.phi;
        const FreeWaveResult r = free_wave_oracle(fw, dxs);
        record(report_json(r.translation, order_gate(r.translation)));
        const double worst_energy = *std::max_element(r.energy.errors.begin(), r.energy.errors.end());
        record(report_json(r.energy, worst_energy <= c.tolerances.conservation_tol,
                           "relative energy drift of the packet must stay below conservation_tol"));
        record({{"name", "free_wave_phi_frozen"}, {"passed", r.max_phi_drift == 0.0}, {"max_phi_drift", r.max_phi_drift}});
    });

    guarded("virial_residual", [&] {
        const VirialConvergence v = virial_convergence(auto_domain_setup(c.soliton, c.perturbation, c.delta_scale, 2.0, step_options(c)), 2.0, dxs);
        record(report_json(v.energy, order_gate(v.energy)));
        record(report_json(v.momentum, order_gate(v.momentum)));
        record({{"name", "virial_unit_cutoff_identity"}, {"passed", v.identity_gap <= 1e-10}, {"max_gap", v.identity_gap}});
    });

    guarded("zero_perturbation_fixed_point", [&] {
        const Grid1D g = make_grid(setup.x_lo, setup.x_hi, 1.0 / 16);
        InitialData d = build_initial_data(c.soliton, c.perturbation, 0.0, g);
        SolitonCache cache(c.soliton, g);
        PerturbationState q = d.perturbation;
        for (int k = 0; k < 200; ++k) q = step(q, g, g.dt(), cache);
        bool zero = true;
        for (const auto* f : q.fields())
            for (double v : *f) zero = zero && v == 0.0;
        record({{"name", "zero_perturbation_fixed_point"}, {"passed", zero}, {"steps", 200}});
    });

    guarded("rhs_form_equivalence", [&] {
        const Grid1D g = make_grid(setup.x_lo, setup.x_hi, 1.0 / 16);
        PerturbationState q;
        q.params = c.soliton;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-0.01, 0.01);
        for (auto* f : q.fields()) {
            f->resize(static_cast<std::size_t>(g.n));
            for (double& v : *f) v = u(rng);
        }
        const SolitonField sf = sample_soliton(c.soliton, g, 0.3);
        q.time = 0.3;
        const Accelerations a = rhs_perturbation(q, g, sf, c.tolerances.lambda_floor);
        const Accelerations b = rhs_perturbation_expanded(q, g, sf, c.tolerances.lambda_floor);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.first.size(); ++i)
            worst = std::max({worst, std::abs(a.first[i] - b.first[i]), std::abs(a.second[i] - b.second[i])});
        record({{"name", "rhs_form_equivalence"}, {"passed", worst <= 1e-12}, {"max_difference", worst}});
    });

    json out;
    out["scenario"] = c.scenario;
    out["checks"] = checks;
    out["failures"] = failures;
    out["passed"] = failures.empty();
    write_text(dir / "verify_report.json", out.dump(2) + "\n");
    for (const json& j : checks)
        std::cout << (j.at("passed").get<bool>() ? "ok    " : "FAIL  ") << j.at("name").get<std::string>() << "\n";
    return failures.empty() ? 0 : 1;
}

int cmd_simulate(const RunConfig& c, const std::string& out_dir) {
    return simulate_into(c, prepare_dir(out_dir), nullptr);
}

int cmd_sweep(const RunConfig& c, const std::string& out_dir) {
    const fs::path dir = prepare_dir(out_dir);
    const std::vector<double> deltas = c.sweep.delta_scale.empty() ? std::vector<double>{c.delta_scale} : c.sweep.delta_scale;
    const std::vector<double> epss = c.sweep.epsilon.empty() ? std::vector<double>{c.soliton.epsilon} : c.sweep.epsilon;

    std::vector<RunConfig> runs;
    for (double e : epss)
        for (double d : deltas) {
            RunConfig r = c;
            r.soliton.epsilon = e;
            r.delta_scale = d;
            r.sweep = {};
            runs.push_back(r);
        }

    struct Outcome {
        int code = 1;
        SimulationResult result;
        std::string error;
    };
    std::vector<Outcome> outcomes(runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            char name[32];
            std::snprintf(name, sizeof name, "run_%03zu", i);
            try {
                validate(runs[i]);
                const fs::path rdir = prepare_dir((dir / name).string());
                outcomes[i].code = simulate_into(runs[i], rdir, &outcomes[i].result);
                if (!outcomes[i].result.ok) outcomes[i].error = outcomes[i].result.error;
            } catch (const std::exception& e) {
                outcomes[i].code = 1;
                outcomes[i].error = e.what();
            }
        }
    };
    unsigned nworkers = c.sweep.workers > 0 ? static_cast<unsigned>(c.sweep.workers) : std::thread::hardware_concurrency();
    nworkers = std::clamp<unsigned>(nworkers, 1u, static_cast<unsigned>(std::max<std::size_t>(runs.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nworkers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::string csv = "run_id,epsilon,delta_scale,status,weighted_initial,weighted_sup,ratio,crossed_drift_rel,error\n";
    int failed = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Outcome& o = outcomes[i];
        const auto& recs = o.result.records;
        double w0 = std::numeric_limits<double>::quiet_NaN(), sup = w0, ratio = w0, drift = w0;
        if (!recs.empty()) {
            w0 = recs.front().norms.surface_total();
            sup = 0.0;
            double dC = 0.0;
            for (const auto& r : recs) {
                sup = std::max(sup, r.norms.surface_total());
                dC = std::max(dC, std::abs(r.crossed - recs.front().crossed));
            }
            ratio = w0 > 0.0 ? sup / w0 : std::numeric_limits<double>::quiet_NaN();
            drift = recs.front().ehat_total > 0.0 ? dC / recs.front().ehat_total : dC;
        }
        std::string err = o.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        char id[16];
        std::snprintf(id, sizeof id, "%03zu", i);
        csv += std::string(id) + "," + format_number(runs[i].soliton.epsilon) + "," + format_number(runs[i].delta_scale) +
               "," + (o.code == 0 ? "ok" : "failed") + "," + format_number(w0) + "," + format_number(sup) + "," +
               format_number(ratio) + "," + format_number(drift) + "," + err + "\n";
        if (o.code != 0) ++failed;
    }
    write_text(dir / "sweep.csv", csv);
    std::cout << "sweep: " << runs.size() - failed << "/" << runs.size() << " runs completed\n";
    return 0;
}

int cmd_diagnose(const RunConfig& c, const std::string& out_dir) {
    const fs::path dir = prepare_dir(out_dir);
    const InitialData d = build_initial_data(c.soliton, c.perturbation, c.delta_scale, c.grid);
    const SolitonField f = sample_soliton(c.soliton, c.grid, 0.0);
    const EvolutionSettings s = settings_from(c);
    const DiagnosticsRecord r = c.mode == RunMode::full
                                    ? compute_record(perturbation_from_full(d.full, c.soliton, f), c.grid, f, s)
                                    : compute_record(d.perturbation, c.grid, f, s);
    const DerivedConstants dc = derive_constants(c.soliton.mu);
    const SolitonSample far = far_field(c.soliton);

    json j;
    j["scenario"] = c.scenario;
    j["derived_constants"] = {{"c", dc.c}, {"v", dc.v}, {"beta", dc.beta}, {"x0", dc.x0}, {"sqrt_c", dc.sqrt_c}};
    j["far_field"] = {{"B", far.B}, {"D", far.D}, {"sinh_B", std::sinh(far.B)}, {"cosh_B", std::cosh(far.B)}};
    j["weighted_initial_norm"] = weighted_initial_norm(d.perturbation, c.grid, c.eta);
    json rec;
    const std::vector<double> vals = record_values(r);
    for (std::size_t k = 0; k < vals.size(); ++k) rec[csv_columns[k]] = number_or_null(vals[k]);
    j["record"] = rec;
    write_text(dir / "diagnose.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"PCF soliton stability lab"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    const char* names[] = {"verify", "simulate", "sweep", "diagnose"};
    const char* help[] = {"run the verification oracles", "evolve one configuration",
                          "run a parameter sweep", "diagnostics of the initial data"};
    std::vector<CLI::App*> subs;
    for (int k = 0; k < 4; ++k) {
        CLI::App* s = app.add_subcommand(names[k], help[k]);
        s->add_option("--config", config_path, "configuration file (JSON)")->required();
        s->add_option("--out", out_dir, "output directory");
        subs.push_back(s);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const RunConfig config = load_config(config_path);
        std::string dir = config.output_dir;
        if (const char* env = std::getenv("PCF_OUT"); env && *env) dir = env;
        if (!out_dir.empty()) dir = out_dir;
        if (subs[0]->parsed()) return cmd_verify(config, dir);
        if (subs[1]->parsed()) return cmd_simulate(config, dir);
        if (subs[2]->parsed()) return cmd_sweep(config, dir);
        return cmd_diagnose(config, dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << error_kind(e) << ": " << e.what() << "\n";
        return 1;
    }
}

} // namespace pcf
