#include "carroll/io.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "carroll/errors.hpp"

namespace carroll::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw InputError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw InputError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                         "': " + ec.message());
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string state_csv(const FluidState& s) {
    std::string out = "x,sigma,beta\n";
    out.reserve(out.size() + s.sigma.size() * 72);
    for (int i = 0; i < s.grid.n_cells; ++i) {
        out += format_double(s.grid.x(i));
        out += ',';
        out += format_double(s.sigma[i]);
        out += ',';
        out += format_double(s.beta[i]);
        out += '\n';
    }
    return out;
}

FluidState parse_state_csv(const std::string& text, const Grid1D& grid) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError("state CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,sigma,beta")
        throw InputError("state CSV: expected header 'x,sigma,beta', got '" + line + "'");
    FluidState s = FluidState::zeros(grid);
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row >= grid.n_cells)
            throw InputError("state CSV: more rows than n_cells=" + std::to_string(grid.n_cells));
        double v[3];
        std::istringstream ls(line);
        std::string cell;
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(ls, cell, ','))
                throw InputError("state CSV: row " + std::to_string(row + 1) + " has fewer than 3 columns");
            char* end = nullptr;
            v[c] = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || !std::isfinite(v[c]))
                throw InputError("state CSV: row " + std::to_string(row + 1) + ", column " +
                                 std::to_string(c + 1) + ": '" + cell + "' is not a finite number");
        }
        if (std::fabs(v[0] - grid.x(row)) > 1e-9 * grid.length())
            throw InputError("state CSV: row " + std::to_string(row + 1) + " x=" + format_double(v[0]) +
                             " does not match cell centre " + format_double(grid.x(row)));
        s.sigma[row] = v[1];
        s.beta[row] = v[2];
        ++row;
    }
    if (row != grid.n_cells)
        throw InputError("state CSV: " + std::to_string(row) + " rows, expected " +
                         std::to_string(grid.n_cells));
    return s;
}

FluidState read_state_csv(const fs::path& path, const Grid1D& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_state_csv(ss.str(), grid);
}

json state_json(const FluidState& s) {
    return json{{"grid", {{"x_min", s.grid.x_min}, {"x_max", s.grid.x_max}, {"n_cells", s.grid.n_cells}}},
                {"t", s.t},
                {"sigma", s.sigma},
                {"beta", s.beta}};
}

FluidState state_from_json(const json& j) {
    try {
        const json& g = j.at("grid");
        FluidState s;
        s.grid = Grid1D::make(g.at("x_min").get<double>(), g.at("x_max").get<double>(),
                              g.at("n_cells").get<int>());
        s.t = j.at("t").get<double>();
        s.sigma = j.at("sigma").get<std::vector<double>>();
        s.beta = j.at("beta").get<std::vector<double>>();
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("state JSON: ") + e.what());
    }
}

std::string histogram_csv(const KineticMeasureHistogram& h) {
    std::string out = "s_lo,s_hi,mu1,mu2\n";
    for (std::size_t j = 0; j < h.mu1.size(); ++j) {
        out += format_double(h.s_edges[j]) + ',' + format_double(h.s_edges[j + 1]) + ',' +
               format_double(h.mu1[j]) + ',' + format_double(h.mu2[j]) + '\n';
    }
    return out;
}

std::string reports_csv(const std::vector<StepReport>& reports) {
    std::string out = "t,dt,min_w1,min_w2,l2_energy,visc_dissipation_cum\n";
    for (const StepReport& r : reports) {
        out += format_double(r.t) + ',' + format_double(r.dt) + ',' + format_double(r.min_w1) +
               ',' + format_double(r.min_w2) + ',' + format_double(r.l2_energy) + ',' +
               format_double(r.visc_dissipation_cum) + '\n';
    }
    return out;
}

json config_json(const SolverConfig& cfg) {
    return json{{"epsilon", cfg.epsilon},
                {"c0", cfg.c0},
                {"t_end", cfg.t_end},
                {"cfl_safety", cfg.cfl_safety},
                {"boundary", to_string(cfg.boundary)},
                {"scheme", to_string(cfg.scheme)},
                {"output_every", cfg.output_every},
                {"tol_invariant", cfg.tol_invariant},
                {"differencing", cfg.differencing == kernels::Differencing::flux_form ? "flux_form" : "pointwise"},
                {"ri_form", cfg.ri_form == kernels::ScalarForm::conservative ? "conservative" : "characteristic"}};
}

json run_summary_json(const Trajectory& traj, bool include_timing) {
    json j{{"config", config_json(traj.config)},
           {"steps", traj.steps},
           {"min_w1_overall", traj.min_w1_overall},
           {"min_w2_overall", traj.min_w2_overall},
           {"initial_l2_energy", traj.initial_l2_energy},
           {"sup_l2_energy", traj.sup_l2_energy},
           {"cum_dissipation", traj.cum_dissipation},
           {"log", traj.log}};
    if (include_timing) j["wallclock_s"] = traj.wallclock_s;
    return j;
}

json audit_json(const std::string& audit, const json& inputs, double value, double threshold,
                bool pass) {
    return json{{"audit", audit}, {"inputs", inputs}, {"value", value}, {"threshold", threshold}, {"pass", pass}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace carroll::io
