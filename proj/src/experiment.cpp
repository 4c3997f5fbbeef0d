#include "carroll/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "carroll/analysis.hpp"
#include "carroll/entropy.hpp"
#include "carroll/errors.hpp"
#include "carroll/io.hpp"

namespace carroll::experiment {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- schema helpers

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
    throw ConfigError("config error at " + (ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

std::string type_name(const json& v) { return v.type_name(); }

void allow_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(ptr, "expected an object, got " + type_name(obj));
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(ptr + "/" + it.key(), "unknown key");
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const std::string& ptr, const char* key) {
    const json* v = find(obj, key);
    if (!v) fail(ptr + "/" + key, "required key is missing");
    return *v;
}

double as_number(const json& v, const std::string& ptr) {
    if (!v.is_number()) fail(ptr, "expected a number, got " + type_name(v));
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ptr, "expected a finite number");
    return d;
}

double as_positive(const json& v, const std::string& ptr) {
    const double d = as_number(v, ptr);
    if (!(d > 0.0)) fail(ptr, "must be > 0 (got " + io::format_double(d) + ")");
    return d;
}

long as_integer(const json& v, const std::string& ptr) {
    if (!v.is_number_integer()) fail(ptr, "expected an integer, got " + type_name(v));
    return v.get<long>();
}

std::string as_string(const json& v, const std::string& ptr) {
    if (!v.is_string()) fail(ptr, "expected a string, got " + type_name(v));
    return v.get<std::string>();
}

Vec2 as_state(const json& v, const std::string& ptr) {
    allow_keys(v, ptr, {"sigma", "beta"});
    return {as_number(need(v, ptr, "sigma"), ptr + "/sigma"),
            as_number(need(v, ptr, "beta"), ptr + "/beta")};
}

std::vector<double> as_positive_list(const json& v, const std::string& ptr) {
    if (!v.is_array()) fail(ptr, "expected an array, got " + type_name(v));
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k)
        out.push_back(as_positive(v[k], ptr + "/" + std::to_string(k)));
    return out;
}

void parse_initial(const json& j, const std::string& ptr, const fs::path& base, InitialData& d) {
    if (!j.is_object()) fail(ptr, "expected an object, got " + type_name(j));
    const std::string kind = as_string(need(j, ptr, "kind"), ptr + "/kind");
    if (kind == "demo_sine") {
        allow_keys(j, ptr, {"kind"});
        d.kind = InitialKind::demo_sine;
    } else if (kind == "constant") {
        allow_keys(j, ptr, {"kind", "sigma", "beta"});
        d.kind = InitialKind::constant;
        d.value = {as_number(need(j, ptr, "sigma"), ptr + "/sigma"),
                   as_number(need(j, ptr, "beta"), ptr + "/beta")};
    } else if (kind == "riemann_jump") {
        allow_keys(j, ptr, {"kind", "left", "right", "x0"});
        d.kind = InitialKind::riemann_jump;
        d.left = as_state(need(j, ptr, "left"), ptr + "/left");
        d.right = as_state(need(j, ptr, "right"), ptr + "/right");
        if (const json* x0 = find(j, "x0")) d.x0 = as_number(*x0, ptr + "/x0");
    } else if (kind == "custom_csv") {
        allow_keys(j, ptr, {"kind", "path"});
        d.kind = InitialKind::custom_csv;
        fs::path p = as_string(need(j, ptr, "path"), ptr + "/path");
        d.path = p.is_absolute() || base.empty() ? p : base / p;
    } else {
        fail(ptr + "/kind", "unknown initial data kind '" + kind +
                                "' (expected demo_sine, constant, riemann_jump or custom_csv)");
    }
}

void parse_solver(const json& j, const std::string& ptr, ExperimentConfig& c) {
    allow_keys(j, ptr, {"epsilon", "c0", "t_end", "cfl_safety", "boundary", "scheme", "output_every",
                        "tol_invariant", "differencing", "ri_form", "exec"});
    SolverConfig& s = c.solver;
    s.epsilon = as_positive(need(j, ptr, "epsilon"), ptr + "/epsilon");
    s.t_end = as_positive(need(j, ptr, "t_end"), ptr + "/t_end");
    if (const json* v = find(j, "c0")) {
        s.c0 = as_positive(*v, ptr + "/c0");
        c.c0_given = true;
    }
    if (const json* v = find(j, "cfl_safety")) {
        s.cfl_safety = as_positive(*v, ptr + "/cfl_safety");
        if (s.cfl_safety > 1.0) fail(ptr + "/cfl_safety", "must lie in (0, 1]");
    }
    if (const json* v = find(j, "boundary")) {
        try {
            s.boundary = boundary_from_string(as_string(*v, ptr + "/boundary"));
        } catch (const ConfigError& e) {
            if (std::string(e.what()).rfind("config error", 0) == 0) throw;
            fail(ptr + "/boundary", e.what());
        }
        c.boundary_given = true;
    }
    if (const json* v = find(j, "scheme")) {
        try {
            s.scheme = scheme_from_string(as_string(*v, ptr + "/scheme"));
        } catch (const ConfigError& e) {
            if (std::string(e.what()).rfind("config error", 0) == 0) throw;
            fail(ptr + "/scheme", e.what());
        }
    }
    if (const json* v = find(j, "output_every")) {
        const long n = as_integer(*v, ptr + "/output_every");
        if (n < 1) fail(ptr + "/output_every", "must be a positive integer");
        s.output_every = static_cast<int>(n);
    }
    if (const json* v = find(j, "tol_invariant")) {
        s.tol_invariant = as_number(*v, ptr + "/tol_invariant");
        if (s.tol_invariant < 0.0) fail(ptr + "/tol_invariant", "must be >= 0");
    }
    if (const json* v = find(j, "differencing")) {
        const std::string d = as_string(*v, ptr + "/differencing");
        if (d == "flux_form") s.differencing = kernels::Differencing::flux_form;
        else if (d == "pointwise") s.differencing = kernels::Differencing::pointwise;
        else fail(ptr + "/differencing", "expected flux_form or pointwise");
    }
    if (const json* v = find(j, "ri_form")) {
        const std::string d = as_string(*v, ptr + "/ri_form");
        if (d == "conservative") s.ri_form = kernels::ScalarForm::conservative;
        else if (d == "characteristic") s.ri_form = kernels::ScalarForm::characteristic;
        else fail(ptr + "/ri_form", "expected conservative or characteristic");
        c.ri_form_given = true;
    }
    if (const json* v = find(j, "exec")) {
        const std::string d = as_string(*v, ptr + "/exec");
        if (d == "serial") s.exec = kernels::Exec::serial;
        else if (d == "parallel") s.exec = kernels::Exec::parallel;
        else fail(ptr + "/exec", "expected serial or parallel");
    }
}

}  // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
    allow_keys(j, "", {"initial_data", "grid", "solver", "sweep", "audits", "output_dir", "seed",
                       "histogram_bins"});
    ExperimentConfig c;
    parse_initial(need(j, "", "initial_data"), "/initial_data", base_dir, c.initial);

    const json& g = need(j, "", "grid");
    allow_keys(g, "/grid", {"x_min", "x_max", "n_cells"});
    const double x_min = as_number(need(g, "/grid", "x_min"), "/grid/x_min");
    const double x_max = as_number(need(g, "/grid", "x_max"), "/grid/x_max");
    const long n = as_integer(need(g, "/grid", "n_cells"), "/grid/n_cells");
    if (n < 4 || n > (1L << 24)) fail("/grid/n_cells", "must lie in [4, 2^24]");
    if (!(x_min < x_max)) fail("/grid", "x_min must be < x_max");
    c.grid = Grid1D::make(x_min, x_max, static_cast<int>(n));

    parse_solver(need(j, "", "solver"), "/solver", c);
    if (!c.boundary_given && c.initial.kind == InitialKind::riemann_jump)
        c.solver.boundary = Boundary::fixed_trace;

    if (const json* s = find(j, "sweep")) {
        allow_keys(*s, "/sweep", {"epsilon", "dx", "snapshot_spacing"});
        if (const json* e = find(*s, "epsilon")) c.sweep_epsilon = as_positive_list(*e, "/sweep/epsilon");
        if (const json* d = find(*s, "dx")) c.sweep_dx = as_positive_list(*d, "/sweep/dx");
        if (const json* sp = find(*s, "snapshot_spacing"))
            c.snapshot_spacing = as_positive(*sp, "/sweep/snapshot_spacing");
    }
    if (const json* a = find(j, "audits")) {
        if (!a->is_array()) fail("/audits", "expected an array, got " + type_name(*a));
        for (std::size_t k = 0; k < a->size(); ++k) {
            const std::string p = "/audits/" + std::to_string(k);
            allow_keys((*a)[k], p, {"pair", "phi"});
            AuditSpec spec;
            spec.pair = as_string(need((*a)[k], p, "pair"), p + "/pair");
            spec.phi = "battery";
            if (const json* phi = find((*a)[k], "phi")) spec.phi = as_string(*phi, p + "/phi");
            if (!in_catalog(spec.pair)) fail(p + "/pair", "unknown entropy pair '" + spec.pair + "'");
            c.audits.push_back(spec);
        }
    }
    if (const json* b = find(j, "histogram_bins")) {
        const long nb = as_integer(*b, "/histogram_bins");
        if (nb < 1) fail("/histogram_bins", "must be a positive integer");
        c.histogram_bins = static_cast<int>(nb);
    }
    if (const json* o = find(j, "output_dir")) c.output_dir = as_string(*o, "/output_dir");
    if (const json* s = find(j, "seed")) {
        const long seed = as_integer(*s, "/seed");
        if (seed < 0 || seed > 0xffffffffL) fail("/seed", "must lie in [0, 2^32)");
        c.seed = static_cast<unsigned>(seed);
    }
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(j, path.parent_path());
}

FluidState initial_state(const ExperimentConfig& cfg, const Grid1D& grid) {
    const InitialData& d = cfg.initial;
    if (d.kind == InitialKind::custom_csv) return io::read_state_csv(d.path, grid);
    FluidState s = FluidState::zeros(grid);
    const double dx = grid.dx();
    for (int i = 0; i < grid.n_cells; ++i) {
        const double x = grid.x(i);
        switch (d.kind) {
            case InitialKind::demo_sine: {
                const double z = 2.0 * M_PI * (x - grid.x_min) / grid.length();
                s.sigma[i] = 2.0 + 0.5 * std::sin(z);
                s.beta[i] = 0.5 * std::cos(z);
                break;
            }
            case InitialKind::constant:
                s.sigma[i] = d.value[0];
                s.beta[i] = d.value[1];
                break;
            case InitialKind::riemann_jump: {
                const double hside = 0.5 * (1.0 + std::tanh((x - d.x0) / (3.0 * dx)));
                s.sigma[i] = d.left[0] + (d.right[0] - d.left[0]) * hside;
                s.beta[i] = d.left[1] + (d.right[1] - d.left[1]) * hside;
                break;
            }
            case InitialKind::custom_csv:
                break;
        }
    }
    return s;
}

SolverConfig resolve_solver(const ExperimentConfig& cfg, const FluidState& s0) {
    SolverConfig s = cfg.solver;
    if (!cfg.c0_given) {
        const double margin = admissibility_margin(s0);
        if (!(margin > 0.0)) {
            int cell = 0;
            while (cell + 1 < s0.size() && s0.sigma[cell] - std::fabs(s0.beta[cell]) > 0.0) ++cell;
            throw InvariantViolation("initial data not admissible: min(sigma - |beta|) = " +
                                         io::format_double(margin) + " <= 0",
                                     cell, s0.t);
        }
        s.c0 = margin;
    }
    s.validate();
    if (s.scheme != Scheme::coupled_modified) {
        const AdmissibilityReport r = check_admissible(s0, s.c0);
        if (!r.admissible) {
            std::ostringstream os;
            os << "initial data not admissible at c0=" << s.c0 << ": first bad cell "
               << r.first_bad_cell << " (min w1=" << r.min_w1 << ", min w2=" << r.min_w2 << ")";
            throw InvariantViolation(os.str(), r.first_bad_cell, s0.t);
        }
    }
    return s;
}

namespace {

fs::path output_dir(const ExperimentConfig& cfg, const CommandOptions& opts) {
    return opts.output_dir.value_or(cfg.output_dir);
}

json grid_json(const Grid1D& g) {
    return json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_cells", g.n_cells}};
}

std::string initial_kind_name(InitialKind k) {
    switch (k) {
        case InitialKind::demo_sine: return "demo_sine";
        case InitialKind::constant: return "constant";
        case InitialKind::riemann_jump: return "riemann_jump";
        case InitialKind::custom_csv: return "custom_csv";
    }
    return "?";
}

json run_record(const ExperimentConfig& cfg, const Trajectory& tr, bool timing) {
    json j = io::run_summary_json(tr, timing);
    j["grid"] = grid_json(tr.initial().grid);
    j["initial_data"] = initial_kind_name(cfg.initial.kind);
    if (cfg.initial.kind == InitialKind::riemann_jump)
        j["mollification"] = "tanh profile of width 3 dx applied to the jump";
    j["c0_source"] = cfg.c0_given ? "config" : "min(sigma0 - |beta0|)";
    return j;
}

// Keeps roughly one snapshot per `spacing` of simulated time.
int output_every_for(const FluidState& s0, const SolverConfig& sc, double spacing) {
    const double dt = stable_dt(s0, sc);
    return std::max(1, static_cast<int>(std::lround(spacing / dt)));
}

// Runs jobs[k]() for all k on `workers` threads; exceptions are rethrown in index order.
template <class Job>
void run_pool(std::vector<Job>& jobs, int workers) {
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                jobs[k]();
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int pool_size(const CommandOptions& opts) {
    return opts.threads > 0 ? opts.threads : std::max(1, omp_get_max_threads());
}

std::vector<SpaceTimeTestFunction> select_phis(const std::string& spec,
                                               const std::vector<SpaceTimeTestFunction>& battery,
                                               const std::string& ptr) {
    if (spec == "battery") return battery;
    for (const auto& p : battery)
        if (p.id == spec) return {p};
    std::string known;
    for (const auto& p : battery) known += (known.empty() ? "" : ", ") + p.id;
    fail(ptr, "unknown test function '" + spec + "' (expected battery or one of: " + known + ")");
}

}  // namespace

int cmd_run(ExperimentConfig cfg, const CommandOptions& opts) {
    const FluidState s0 = initial_state(cfg, cfg.grid);
    const SolverConfig sc = resolve_solver(cfg, s0);
    const Trajectory tr = run(s0, sc);
    const fs::path out = output_dir(cfg, opts);
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        std::ostringstream name;
        name << "snapshot_" << std::setw(6) << std::setfill('0') << k << ".csv";
        io::write_atomic(out / "snapshots" / name.str(), io::state_csv(tr.snapshots[k]));
    }
    io::write_atomic(out / "steps.csv", io::reports_csv(tr.reports));
    io::write_atomic(out / "final_state.json", io::dump(io::state_json(tr.final_state())));
    io::write_atomic(out / "summary.json", io::dump(run_record(cfg, tr, true)));
    return 0;
}

int cmd_sweep_eps(ExperimentConfig cfg, const CommandOptions& opts) {
    const std::vector<double>& eps = cfg.sweep_epsilon;
    if (eps.size() < 3) fail("/sweep/epsilon", "an epsilon sweep needs at least 3 values");
    for (std::size_t k = 0; k + 1 < eps.size(); ++k)
        if (!(eps[k + 1] < eps[k])) fail("/sweep/epsilon/" + std::to_string(k + 1), "values must be strictly decreasing");

    const FluidState s0 = initial_state(cfg, cfg.grid);
    const int workers = pool_size(opts);
    std::vector<Trajectory> trajs(eps.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        jobs.emplace_back([&, k] {
            ExperimentConfig member = cfg;
            member.solver.epsilon = eps[k];
            SolverConfig sc = resolve_solver(member, s0);
            if (workers > 1) sc.exec = kernels::Exec::serial;
            sc.output_every = output_every_for(s0, sc, cfg.snapshot_spacing);
            trajs[k] = run(s0, sc);
        });
    }
    run_pool(jobs, workers);

    const fs::path out = output_dir(cfg, opts);
    std::vector<const Trajectory*> ptrs;
    json members = json::array();
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        ptrs.push_back(&trajs[k]);
        std::ostringstream dir;
        dir << "eps_" << std::setw(2) << std::setfill('0') << k;
        io::write_atomic(out / "runs" / dir.str() / "summary.json", io::dump(run_record(cfg, trajs[k], true)));
        io::write_atomic(out / "runs" / dir.str() / "final_state.csv", io::state_csv(trajs[k].final_state()));
        members.push_back(run_record(cfg, trajs[k], false));
    }
    const ConvergenceReport conv = convergence_metrics(ptrs, SweepKind::epsilon);

    const auto battery = bump_battery(s0.t, trajs.front().final_state().t, cfg.grid);
    json weak = json::array();
    for (const auto& phi : battery) {
        std::vector<double> mags;
        json comps = json::array();
        for (const Trajectory& tr : trajs) {
            const Vec2 r = weak_residual(tr, phi);
            mags.push_back(std::hypot(r[0], r[1]));
            comps.push_back({r[0], r[1]});
        }
        bool decreasing = true;
        for (std::size_t k = 0; k + 1 < mags.size(); ++k) decreasing = decreasing && mags[k + 1] < mags[k];
        bool positive = std::all_of(mags.begin(), mags.end(), [](double v) { return v > 0.0; });
        weak.push_back({{"phi", phi.id},
                        {"magnitude", mags},
                        {"components", comps},
                        {"strictly_decreasing", decreasing},
                        {"fitted_exponent", positive ? json(loglog_slope(eps, mags)) : json(nullptr)}});
    }
    json report{{"command", "sweep-eps"},
                {"epsilon", eps},
                {"grid", grid_json(cfg.grid)},
                {"t_end", cfg.solver.t_end},
                {"window", {{"x_lo", conv.window.x_lo}, {"x_hi", conv.window.x_hi}}},
                {"l1_differences", conv.l1_differences},
                {"l1_rates", conv.rates},
                {"l1_monotone_decreasing", conv.monotone_decreasing},
                {"l1_note", "L1 differences between consecutive epsilon runs: a Cauchy-sequence proxy, not a rate claim"},
                {"weak_residual", weak},
                {"members", members},
                {"seed", cfg.seed}};
    io::write_atomic(out / "sweep_report.json", io::dump(report));
    return 0;
}

int cmd_entropy_audit(ExperimentConfig cfg, const CommandOptions& opts) {
    if (cfg.audits.empty()) fail("/audits", "the audit list must be non-empty");
    const FluidState s0 = initial_state(cfg, cfg.grid);
    SolverConfig sc = resolve_solver(cfg, s0);
    sc.output_every = 1;  // the kinetic mass identity needs every step
    const Trajectory tr = run(s0, sc);
    const auto battery = bump_battery(s0.t, tr.final_state().t, cfg.grid);
    const double dx = cfg.grid.dx();

    // Certify every requested pair before evaluating any audit.
    std::vector<std::pair<EntropyPairEval, std::vector<SpaceTimeTestFunction>>> work;
    for (std::size_t k = 0; k < cfg.audits.size(); ++k) {
        const std::string ptr = "/audits/" + std::to_string(k);
        EntropyPairEval pair = catalog_pair(cfg.audits[k].pair);
        const ConvexityCertificate cert = certify_on_trajectory(tr, pair, cfg.seed);
        if (!cert.convex) {
            std::ostringstream os;
            os << "pair '" << cfg.audits[k].pair
               << "' is not certified convex on the run's range (min Hessian eigenvalue "
               << cert.min_eigenvalue << " at sigma=" << cert.at_sigma << ", beta=" << cert.at_beta << ")";
            fail(ptr + "/pair", os.str());
        }
        work.emplace_back(std::move(pair), select_phis(cfg.audits[k].phi, battery, ptr + "/phi"));
    }

    json rows = json::array();
    std::ostringstream table;
    auto sci = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6e", v);
        return std::string(buf);
    };
    table << std::left << std::setw(22) << "audit" << std::setw(14) << "pair" << std::setw(18) << "phi"
          << std::setw(16) << "value" << std::setw(16) << "bound" << "result\n";
    bool all_pass = true;
    auto add_row = [&](const std::string& audit, const std::string& pair, const std::string& phi,
                       const json& inputs, double value, double threshold, bool pass) {
        rows.push_back(io::audit_json(audit, inputs, value, threshold, pass));
        all_pass = all_pass && pass;
        table << std::setw(22) << audit << std::setw(14) << pair << std::setw(18) << phi
              << std::setw(16) << sci(value) << std::setw(16) << sci(threshold)
              << (pass ? "PASS" : "FAIL") << "\n";
    };

    for (const auto& [pair, phis] : work) {
        for (const auto& phi : phis) {
            const EntropyAudit a = audit_entropy_inequality(tr, pair, phi, cfg.seed);
            add_row("entropy_inequality", a.pair, a.phi,
                    {{"pair", a.pair}, {"phi", a.phi}, {"epsilon", sc.epsilon}, {"dx", dx},
                     {"c_pair", a.c_pair}, {"criterion", "value >= -threshold, threshold = c_pair*(sqrt(eps)+dx^2), calibrated"}},
                    a.value, -a.threshold, a.pass);
        }
    }

    const KineticMeasureHistogram h = kinetic_measures(tr, cfg.histogram_bins);
    const double min_mu1 = *std::min_element(h.mu1.begin(), h.mu1.end());
    add_row("mu1_nonnegative", "-", "-", {{"bins", cfg.histogram_bins}}, min_mu1, 0.0, min_mu1 >= 0.0);
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < h.mu1.size(); ++j) worst_excess = std::max(worst_excess, std::fabs(h.mu2[j]) - h.mu1[j]);
    add_row("mu2_bounded_by_mu1", "-", "-", {{"bins", cfg.histogram_bins}}, worst_excess, 0.0, worst_excess <= 0.0);
    const double ref = 2.0 * tr.cum_dissipation;
    const double rel = ref > 0.0 ? std::fabs(h.total_mu1() - ref) / ref : std::fabs(h.total_mu1());
    add_row("mu1_mass_identity", "-", "-", {{"total_mu1", h.total_mu1()}, {"twice_cum_dissipation", ref}}, rel, 1e-12,
            rel <= 1e-12);
    const double outside = std::max(h.s_min - dx - h.support_lo, h.support_hi - (h.s_max + dx));
    add_row("mu_support", "-", "-", {{"support", {h.support_lo, h.support_hi}}, {"s_range", {h.s_min, h.s_max}}, {"pad", dx}},
            outside, 0.0, outside <= 0.0);

    const fs::path out = output_dir(cfg, opts);
    io::write_atomic(out / "histogram.csv", io::histogram_csv(h));
    io::write_atomic(out / "audit_table.txt", table.str() + (all_pass ? "ALL PASS\n" : "SOME FAIL\n"));
    io::write_atomic(out / "audit_table.json",
                     io::dump(json{{"command", "entropy-audit"}, {"run", run_record(cfg, tr, false)}, {"rows", rows},
                                   {"all_pass", all_pass}, {"seed", cfg.seed}}));
    return 0;
}

int cmd_oracle_compare(ExperimentConfig cfg, const CommandOptions& opts) {
    std::vector<int> cells;
    if (cfg.sweep_dx.empty()) {
        cells = {cfg.grid.n_cells, 2 * cfg.grid.n_cells};
    } else {
        for (std::size_t k = 0; k < cfg.sweep_dx.size(); ++k) {
            const double n = cfg.grid.length() / cfg.sweep_dx[k];
            if (std::fabs(n - std::round(n)) > 1e-9 * n)
                fail("/sweep/dx/" + std::to_string(k), "dx must divide the domain length");
            cells.push_back(static_cast<int>(std::lround(n)));
        }
        if (cells.size() < 2) fail("/sweep/dx", "oracle comparison needs at least two grids");
    }
    const kernels::ScalarForm primary =
        cfg.ri_form_given ? cfg.solver.ri_form : kernels::ScalarForm::characteristic;

    struct Gaps {
        double linf_ri = 0, l1_ri = 0, linf_ri_other = 0, linf_mod = 0, l1_mod = 0;
    };
    std::vector<Gaps> gaps(cells.size());
    const int workers = pool_size(opts);
    std::vector<std::function<void()>> jobs;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        jobs.emplace_back([&, k] {
            const Grid1D g = Grid1D::make(cfg.grid.x_min, cfg.grid.x_max, cells[k]);
            const FluidState s0 = initial_state(cfg, g);
            SolverConfig base = resolve_solver(cfg, s0);
            base.output_every = std::numeric_limits<int>::max();
            if (workers > 1) base.exec = kernels::Exec::serial;
            auto final_of = [&](Scheme s, kernels::ScalarForm f) {
                SolverConfig c = base;
                c.scheme = s;
                c.ri_form = f;
                return run(s0, c).final_state();
            };
            const FluidState a = final_of(Scheme::coupled_conservative, primary);
            const FluidState r = final_of(Scheme::scalar_ri, primary);
            const FluidState r2 = final_of(Scheme::scalar_ri, primary == kernels::ScalarForm::characteristic
                                                                  ? kernels::ScalarForm::conservative
                                                                  : kernels::ScalarForm::characteristic);
            const FluidState m = final_of(Scheme::coupled_modified, primary);
            Gaps& gk = gaps[k];
            for (int i = 0; i < g.n_cells; ++i) {
                const double dr = std::max(std::fabs(a.sigma[i] - r.sigma[i]), std::fabs(a.beta[i] - r.beta[i]));
                const double dm = std::max(std::fabs(a.sigma[i] - m.sigma[i]), std::fabs(a.beta[i] - m.beta[i]));
                const double dr2 = std::max(std::fabs(a.sigma[i] - r2.sigma[i]), std::fabs(a.beta[i] - r2.beta[i]));
                gk.linf_ri = std::max(gk.linf_ri, dr);
                gk.linf_mod = std::max(gk.linf_mod, dm);
                gk.linf_ri_other = std::max(gk.linf_ri_other, dr2);
                gk.l1_ri += (std::fabs(a.sigma[i] - r.sigma[i]) + std::fabs(a.beta[i] - r.beta[i])) * g.dx();
                gk.l1_mod += (std::fabs(a.sigma[i] - m.sigma[i]) + std::fabs(a.beta[i] - m.beta[i])) * g.dx();
            }
        });
    }
    run_pool(jobs, workers);

    auto form_name = [](kernels::ScalarForm f) {
        return f == kernels::ScalarForm::characteristic ? "characteristic" : "conservative";
    };
    json grids = json::array();
    json ratios_ri = json::array(), ratios_mod = json::array();
    for (std::size_t k = 0; k < cells.size(); ++k) {
        grids.push_back({{"n_cells", cells[k]},
                         {"dx", cfg.grid.length() / cells[k]},
                         {"linf_gap_scalar_ri", gaps[k].linf_ri},
                         {"l1_gap_scalar_ri", gaps[k].l1_ri},
                         {"linf_gap_scalar_ri_other_form", gaps[k].linf_ri_other},
                         {"linf_gap_modified", gaps[k].linf_mod},
                         {"l1_gap_modified", gaps[k].l1_mod}});
        if (k + 1 < cells.size()) {
            ratios_ri.push_back(gaps[k].linf_ri / gaps[k + 1].linf_ri);
            ratios_mod.push_back(gaps[k].linf_mod / gaps[k + 1].linf_mod);
        }
    }
    json report{{"command", "oracle-compare"},
                {"t_end", cfg.solver.t_end},
                {"epsilon", cfg.solver.epsilon},
                {"scalar_ri_form", form_name(primary)},
                {"grids", grids},
                {"linf_ratio_scalar_ri", ratios_ri},
                {"linf_ratio_modified", ratios_mod},
                {"note", "the conservative Riemann-invariant form equals the coupled scheme up to rounding; "
                         "the characteristic form differs at second order"}};
    io::write_atomic(output_dir(cfg, opts) / "oracle_report.json", io::dump(report));
    return 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvariantViolation*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const NumericalError*>(&e))
        return 2;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InputError*>(&e) ||
        dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const AdmissibilityError*>(&e))
        return 3;
    return 1;
}

std::string error_line(const std::exception& e) {
    json j;
    const auto* ce = dynamic_cast<const Error*>(&e);
    j["error"] = ce ? ce->kind() : "internal_error";
    j["message"] = e.what();
    j["exit_code"] = exit_code_for(e);
    if (const auto* iv = dynamic_cast<const InvariantViolation*>(&e)) {
        j["cell"] = iv->cell();
        j["t"] = iv->time();
    }
    return j.dump();
}

int dispatch(const std::string& command, const fs::path& config_path, const CommandOptions& opts,
             std::ostream& err) {
    try {
        if (opts.threads > 0) omp_set_num_threads(opts.threads);
        ExperimentConfig cfg = load_config(config_path);
        if (opts.seed) cfg.seed = *opts.seed;
        if (command == "run") return cmd_run(cfg, opts);
        if (command == "sweep-eps") return cmd_sweep_eps(cfg, opts);
        if (command == "entropy-audit") return cmd_entropy_audit(cfg, opts);
        if (command == "oracle-compare") return cmd_oracle_compare(cfg, opts);
        throw ConfigError("unknown command '" + command + "'");
    } catch (const fs::filesystem_error& e) {
        const InputError wrapped(e.what());
        err << error_line(wrapped) << std::endl;
        return exit_code_for(wrapped);
    } catch (const std::exception& e) {
        err << error_line(e) << std::endl;
        return exit_code_for(e);
    }
}

}  // namespace carroll::experiment
