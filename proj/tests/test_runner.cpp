#include "pcf/config.hpp"
#include "pcf/errors.hpp"
#include "pcf/runner.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pcf;
namespace fs = std::filesystem;

namespace {

std::string preset_path(const std::string& name) { return std::string(PCF_SOURCE_DIR) + "/presets/" + name + ".json"; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pcf_test_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_config() {
    RunConfig c = load_config(preset_path("perturbed-soliton"));
    c.grid = make_grid(-25, 25, 1.0 / 16);
    c.t_end = 1.0;
    c.cadence = 8;
    c.sweep = {};
    return c;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pcf");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("config: presets load and round-trip") {
    for (const char* name : {"soliton-only", "perturbed-soliton", "flat-background", "free-wave-check",
                             "acceptance-conservation"}) {
        const RunConfig c = load_config(preset_path(name));
        CHECK(c.scenario == name);
        CHECK(parse_config(serialize_config(c)) == c);
    }
    CHECK(load_config(preset_path("flat-background")).soliton.epsilon == 0.0);
}

TEST_CASE("config: fail-closed parsing") {
    CHECK_THROWS_AS(parse_config("{\"bogus\": 1}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"soliton\": {\"mu\": 0.5, \"nu\": 1}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"t_end\": \"long\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config: invariants") {
    RunConfig c = small_config();
    CHECK_NOTHROW(validate(c));
    c.soliton.mu = 1.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.eta = 0.5;
    try {
        validate(c);
        FAIL("eta = 0.5 accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("0 < eta < 1/3") != std::string::npos);
    }
    c = small_config();
    c.delta_scale = -1.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.t_end = 30.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("csv: fixed schema and number format") {
    CHECK(csv_header() ==
          "t,E_total,P_total,crossed,exterior_R,window_v,E0,E1,Ebar0,Ebar1,F0,F1,Fbar0,Fbar1,virial_max,virial_l2,"
          "decay_ratio,sinh_min,sinh_max,cosh_min,cosh_max\n");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(std::stod(format_number(0.1)) == 0.1);
    DiagnosticsRecord r;
    const std::string row = csv_row(r);
    CHECK(std::count(row.begin(), row.end(), ',') == 20);
    CHECK(row.back() == '\n');
}

TEST_CASE("simulate: deterministic output, snapshots and report") {
    RunConfig c = small_config();
    c.snapshot_every = 2;
    const fs::path a = scratch("sim_a"), b = scratch("sim_b");
    CHECK(cmd_simulate(c, a.string()) == 0);
    CHECK(cmd_simulate(c, b.string()) == 0);
    const std::string csv = slurp(a / "timeseries.csv");
    CHECK(csv == slurp(b / "timeseries.csv"));
    CHECK(csv.back() == '\n');
    CHECK(fs::exists(a / "fields_t0.000000.csv"));
    CHECK(slurp(a / "fields_t0.000000.csv").rfind("x,z,w,s,m\n", 0) == 0);
    const auto report = nlohmann::json::parse(slurp(a / "report.json"));
    CHECK(report.at("status") == "ok");
    CHECK(report.at("crossed_conserved").get<bool>());
    CHECK(report.at("t_final").get<double>() == 1.0);

    c.mode = RunMode::full;
    const fs::path f = scratch("sim_full");
    CHECK(cmd_simulate(c, f.string()) == 0);
    CHECK(slurp(f / "fields_t0.000000.csv").rfind("x,Lambda,Pi,phi,Psi\n", 0) == 0);
}

TEST_CASE("simulate: zero perturbation gives zero perturbation diagnostics") {
    RunConfig c = small_config();
    c.delta_scale = 0.0;
    const SimulationResult r = run_simulation(c);
    REQUIRE(r.ok);
    for (const auto& rec : r.records) {
        CHECK(rec.crossed == 0.0);
        CHECK(rec.exterior_R == 0.0);
        CHECK(rec.norms.surface_total() == 0.0);
        CHECK(rec.decay_ratio == 0.0);
    }
}

TEST_CASE("simulate: failures report kind and time") {
    RunConfig c = small_config();
    c.tolerances.lambda_floor = 0.5;  // above B everywhere
    const SimulationResult r = run_simulation(c);
    CHECK_FALSE(r.ok);
    CHECK(r.error_kind == "CoefficientSingularity");
    const fs::path d = scratch("sim_fail");
    CHECK(cmd_simulate(c, d.string()) == 1);
    const auto report = nlohmann::json::parse(slurp(d / "report.json"));
    CHECK(report.at("status") == "failed");
    CHECK(report.at("error").at("kind") == "CoefficientSingularity");
}

TEST_CASE("sweep: singleton range reproduces simulate") {
    RunConfig c = small_config();
    const fs::path s = scratch("sweep_one"), d = scratch("sweep_ref");
    c.sweep.delta_scale = {c.delta_scale};
    c.sweep.epsilon = {c.soliton.epsilon};
    CHECK(cmd_sweep(c, s.string()) == 0);
    RunConfig plain = c;
    plain.sweep = {};
    CHECK(cmd_simulate(plain, d.string()) == 0);
    CHECK(slurp(s / "run_000" / "timeseries.csv") == slurp(d / "timeseries.csv"));
}

TEST_CASE("sweep: ratios finite and positive, rows in order") {
    RunConfig c = small_config();
    c.sweep.delta_scale = {0.0025, 0.005};
    c.sweep.epsilon = {0.005, 0.01};
    c.sweep.workers = 2;
    const fs::path s = scratch("sweep_grid");
    CHECK(cmd_sweep(c, s.string()) == 0);
    std::istringstream in(slurp(s / "sweep.csv"));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind((rows < 10 ? "00" : "0") + std::to_string(rows) + ",", 0) == 0);
        CHECK(line.find(",ok,") != std::string::npos);
        std::vector<std::string> cells;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() >= 8);
        const double ratio = std::stod(cells[6]);
        CHECK(std::isfinite(ratio));
        CHECK(ratio > 0.0);
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("cli: exit codes and output directory precedence") {
    const fs::path cfg_dir = scratch("cli");
    fs::create_directories(cfg_dir);
    RunConfig c = small_config();
    c.output_dir = (cfg_dir / "from_config").string();
    const fs::path cfg = cfg_dir / "run.json";
    std::ofstream(cfg) << serialize_config(c);

    CHECK(cli({"diagnose", "--config", cfg.string()}) == 0);
    CHECK(fs::exists(cfg_dir / "from_config" / "diagnose.json"));

    setenv("PCF_OUT", (cfg_dir / "from_env").string().c_str(), 1);
    CHECK(cli({"diagnose", "--config", cfg.string()}) == 0);
    CHECK(fs::exists(cfg_dir / "from_env" / "diagnose.json"));
    CHECK(cli({"diagnose", "--config", cfg.string(), "--out", (cfg_dir / "from_flag").string()}) == 0);
    CHECK(fs::exists(cfg_dir / "from_flag" / "diagnose.json"));
    unsetenv("PCF_OUT");

    RunConfig bad = c;
    bad.soliton.mu = 1.0;
    std::string text = serialize_config(bad);
    std::ofstream(cfg_dir / "bad.json") << text;
    CHECK(cli({"verify", "--config", (cfg_dir / "bad.json").string()}) == 2);
    CHECK(cli({"simulate"}) == 2);
    CHECK(cli({"frobnicate"}) == 2);
}
