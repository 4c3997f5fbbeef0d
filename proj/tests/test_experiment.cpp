#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "carroll/errors.hpp"
#include "carroll/experiment.hpp"
#include "carroll/io.hpp"

using namespace carroll;
using namespace carroll::experiment;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("carroll_exp_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json base_config() {
    return json::parse(R"({
        "initial_data": {"kind": "demo_sine"},
        "grid": {"x_min": 0, "x_max": 1, "n_cells": 64},
        "solver": {"epsilon": 0.02, "c0": 1, "t_end": 0.05, "output_every": 50}
    })");
}

std::string config_error(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "config.json") {
    const fs::path p = dir / name;
    io::write_atomic(p, j.dump(2));
    return p;
}

int dispatch_to(const std::string& cmd, const fs::path& cfg, const fs::path& out, std::string& err_text,
                int threads = 0) {
    CommandOptions o;
    o.output_dir = out;
    o.threads = threads;
    std::ostringstream err;
    const int code = dispatch(cmd, cfg, o, err);
    err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("config parsing defaults and values") {
    const ExperimentConfig c = parse_config(base_config());
    CHECK(c.grid.n_cells == 64);
    CHECK(c.solver.epsilon == 0.02);
    CHECK(c.solver.output_every == 50);
    CHECK(c.c0_given);
    CHECK(c.solver.boundary == Boundary::periodic);
    CHECK(c.seed == 12345u);
    CHECK(c.histogram_bins == 64);

    json rj = base_config();
    rj["initial_data"] = json::parse(R"({"kind": "riemann_jump", "left": {"sigma": 2, "beta": 0.2},
                                         "right": {"sigma": 2.5, "beta": -0.3}})");
    const ExperimentConfig r = parse_config(rj);
    CHECK(r.solver.boundary == Boundary::fixed_trace);
    const FluidState s = initial_state(r, r.grid);
    CHECK(s.sigma.front() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s.sigma.back() == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(s.beta[32] == doctest::Approx(-0.05).epsilon(0.3));
}

TEST_CASE("config errors name their JSON pointer") {
    json j = base_config();
    j["solver"]["epsilon"] = 0;
    CHECK(config_error(j).rfind("config error at /solver/epsilon", 0) == 0);
    j = base_config();
    j["solver"]["typo"] = 1;
    CHECK(config_error(j).rfind("config error at /solver/typo: unknown key", 0) == 0);
    j = base_config();
    j.erase("grid");
    CHECK(config_error(j).rfind("config error at /grid: required key is missing", 0) == 0);
    j = base_config();
    j["grid"]["n_cells"] = 10.5;
    CHECK(config_error(j).rfind("config error at /grid/n_cells", 0) == 0);
    j = base_config();
    j["initial_data"]["kind"] = "square";
    CHECK(config_error(j).rfind("config error at /initial_data/kind", 0) == 0);
    j = base_config();
    j["audits"] = json::parse(R"([{"pair": "special"}, {"pair": "made-up"}])");
    CHECK(config_error(j).rfind("config error at /audits/1/pair", 0) == 0);
    j = base_config();
    j["solver"]["scheme"] = "upwind";
    CHECK(config_error(j).rfind("config error at /solver/scheme", 0) == 0);
    j = base_config();
    j["sweep"] = json::parse(R"({"epsilon": [0.04, -0.02]})");
    CHECK(config_error(j).rfind("config error at /sweep/epsilon/1", 0) == 0);
}

TEST_CASE("admissibility gate and c0 resolution") {
    json j = base_config();
    j["solver"].erase("c0");
    ExperimentConfig c = parse_config(j);
    const FluidState s = initial_state(c, c.grid);
    CHECK(resolve_solver(c, s).c0 == doctest::Approx(admissibility_margin(s)));

    j = base_config();
    j["initial_data"] = json::parse(R"({"kind": "riemann_jump", "left": {"sigma": 2, "beta": 0.2},
                                        "right": {"sigma": 0.4, "beta": -0.5}, "x0": 0.5})");
    c = parse_config(j);
    try {
        resolve_solver(c, initial_state(c, c.grid));
        FAIL("expected InvariantViolation");
    } catch (const InvariantViolation& e) {
        CHECK(e.cell() > 28);
        CHECK(e.cell() < 40);
    }
    c.solver.scheme = Scheme::coupled_modified;
    CHECK_NOTHROW(resolve_solver(c, initial_state(c, c.grid)));
}

TEST_CASE("exit codes and error lines") {
    CHECK(exit_code_for(InvariantViolation("x", 3, 0.5)) == 2);
    CHECK(exit_code_for(DomainError("x")) == 2);
    CHECK(exit_code_for(NumericalError("x")) == 2);
    CHECK(exit_code_for(ConfigError("x")) == 3);
    CHECK(exit_code_for(InputError("x")) == 3);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
    const std::string line = error_line(InvariantViolation("left \"region\"\nbadly", 7, 0.25));
    CHECK(line.find('\n') == std::string::npos);
    const json j = json::parse(line);
    CHECK(j["error"] == "invariant_violation");
    CHECK(j["exit_code"] == 2);
    CHECK(j["cell"] == 7);
    CHECK(j["t"] == 0.25);
}

TEST_CASE("run command writes its artifacts") {
    TempDir tmp("run");
    const fs::path cfg = write_config(tmp.path, base_config());
    std::string err;
    REQUIRE(dispatch_to("run", cfg, tmp.path / "out", err) == 0);
    CHECK(err.empty());
    const json summary = json::parse(slurp(tmp.path / "out" / "summary.json"));
    CHECK(summary["min_w1_overall"].get<double>() >= 0.999999);
    CHECK(summary["min_w2_overall"].get<double>() >= 0.999999);
    CHECK(summary.contains("wallclock_s"));
    CHECK(fs::exists(tmp.path / "out" / "snapshots" / "snapshot_000000.csv"));
    CHECK(fs::exists(tmp.path / "out" / "steps.csv"));
    const FluidState fin = io::state_from_json(json::parse(slurp(tmp.path / "out" / "final_state.json")));
    CHECK(fin.t == doctest::Approx(0.05));
}

TEST_CASE("run command failure modes") {
    TempDir tmp("fail");
    std::string err;
    json j = base_config();
    j["solver"]["epsilon"] = 0.0;
    CHECK(dispatch_to("run", write_config(tmp.path, j), tmp.path / "o1", err) == 3);
    CHECK(json::parse(err)["exit_code"] == 3);
    CHECK(std::count(err.begin(), err.end(), '\n') == 1);

    j = base_config();
    j["initial_data"] = json::parse(R"({"kind": "riemann_jump", "left": {"sigma": 2, "beta": 0.2},
                                        "right": {"sigma": 0.4, "beta": -0.5}})");
    j["solver"].erase("c0");
    CHECK(dispatch_to("run", write_config(tmp.path, j), tmp.path / "o2", err) == 2);
    CHECK(json::parse(err).contains("cell"));
    CHECK_FALSE(fs::exists(tmp.path / "o2" / "summary.json"));

    CHECK(dispatch_to("run", tmp.path / "missing.json", tmp.path / "o3", err) == 3);
    io::write_atomic(tmp.path / "broken.json", "{ not json");
    CHECK(dispatch_to("run", tmp.path / "broken.json", tmp.path / "o4", err) == 3);
    CHECK(dispatch_to("bogus", write_config(tmp.path, base_config()), tmp.path / "o5", err) == 3);
}

TEST_CASE("custom CSV initial data") {
    TempDir tmp("csv");
    json j = base_config();
    const ExperimentConfig c = parse_config(j);
    const FluidState s = initial_state(c, c.grid);
    io::write_atomic(tmp.path / "init.csv", io::state_csv(s));
    j["initial_data"] = json::parse(R"({"kind": "custom_csv", "path": "init.csv"})");
    const fs::path cfg = write_config(tmp.path, j);
    const ExperimentConfig loaded = load_config(cfg);
    const FluidState back = initial_state(loaded, loaded.grid);
    CHECK(back.sigma == s.sigma);
    std::string err;
    CHECK(dispatch_to("run", cfg, tmp.path / "out", err) == 0);
}

TEST_CASE("sweep command validation and determinism") {
    TempDir tmp("sweep");
    std::string err;
    json j = base_config();
    j["sweep"] = json::parse(R"({"epsilon": [0.04]})");
    CHECK(dispatch_to("sweep-eps", write_config(tmp.path, j), tmp.path / "o0", err) == 3);
    j["sweep"] = json::parse(R"({"epsilon": [0.04, 0.04, 0.01]})");
    CHECK(dispatch_to("sweep-eps", write_config(tmp.path, j), tmp.path / "o0", err) == 3);

    j["solver"]["t_end"] = 0.2;
    j["sweep"] = json::parse(R"({"epsilon": [0.04, 0.02, 0.01], "snapshot_spacing": 0.005})");
    const fs::path cfg = write_config(tmp.path, j);
    REQUIRE(dispatch_to("sweep-eps", cfg, tmp.path / "a", err, 1) == 0);
    REQUIRE(dispatch_to("sweep-eps", cfg, tmp.path / "b", err, 2) == 0);
    const std::string ra = slurp(tmp.path / "a" / "sweep_report.json");
    CHECK(ra == slurp(tmp.path / "b" / "sweep_report.json"));
    CHECK(slurp(tmp.path / "a" / "runs" / "eps_02" / "final_state.csv") ==
          slurp(tmp.path / "b" / "runs" / "eps_02" / "final_state.csv"));
    const json rep = json::parse(ra);
    CHECK(rep["l1_monotone_decreasing"] == true);
    CHECK(rep["weak_residual"].size() == 9);
    CHECK(rep["l1_differences"].size() == 2);
}

TEST_CASE("entropy audit command") {
    TempDir tmp("audit");
    std::string err;
    json j = base_config();
    j["audits"] = json::parse(R"([{"pair": "special", "phi": "bump_w0.4_c0.5"}])");
    j["histogram_bins"] = 16;
    REQUIRE(dispatch_to("entropy-audit", write_config(tmp.path, j), tmp.path / "ok", err) == 0);
    const json table = json::parse(slurp(tmp.path / "ok" / "audit_table.json"));
    CHECK(table["rows"].size() == 5);
    CHECK(table["rows"][1]["audit"] == "mu1_nonnegative");
    CHECK(table["rows"][1]["pass"] == true);
    CHECK(table["rows"][3]["pass"] == true);
    const std::string txt = slurp(tmp.path / "ok" / "audit_table.txt");
    CHECK(txt.find("mu1_mass_identity") != std::string::npos);
    CHECK(slurp(tmp.path / "ok" / "histogram.csv").rfind("s_lo,s_hi,mu1,mu2\n", 0) == 0);

    j["audits"] = json::parse(R"([{"pair": "concave-control"}])");
    CHECK(dispatch_to("entropy-audit", write_config(tmp.path, j), tmp.path / "cc", err) == 3);
    CHECK(err.find("/audits/0/pair") != std::string::npos);
    j["audits"] = json::parse(R"([{"pair": "no-such-pair"}])");
    CHECK(dispatch_to("entropy-audit", write_config(tmp.path, j), tmp.path / "np", err) == 3);
    j["audits"] = json::parse(R"([{"pair": "special", "phi": "bump_w9"}])");
    CHECK(dispatch_to("entropy-audit", write_config(tmp.path, j), tmp.path / "nf", err) == 3);
    j["audits"] = json::array();
    CHECK(dispatch_to("entropy-audit", write_config(tmp.path, j), tmp.path / "na", err) == 3);
}

TEST_CASE("oracle comparison") {
    TempDir tmp("oracle");
    std::string err;
    json j = base_config();
    j["initial_data"] = json::parse(R"({"kind": "constant", "sigma": 2, "beta": 0.5})");
    REQUIRE(dispatch_to("oracle-compare", write_config(tmp.path, j), tmp.path / "c", err) == 0);
    const json c = json::parse(slurp(tmp.path / "c" / "oracle_report.json"));
    for (const auto& g : c["grids"]) {
        CHECK(g["linf_gap_scalar_ri"].get<double>() <= 1e-13);
        CHECK(g["linf_gap_modified"].get<double>() <= 1e-13);
    }

    j = base_config();
    j["solver"]["t_end"] = 0.1;
    REQUIRE(dispatch_to("oracle-compare", write_config(tmp.path, j), tmp.path / "d", err) == 0);
    const json d = json::parse(slurp(tmp.path / "d" / "oracle_report.json"));
    CHECK(d["scalar_ri_form"] == "characteristic");
    const double ratio = d["linf_ratio_scalar_ri"][0].get<double>();
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
    CHECK(d["grids"][0]["linf_gap_scalar_ri_other_form"].get<double>() <= 1e-12);
}
