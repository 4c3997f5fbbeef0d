#include "carroll/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "carroll/errors.hpp"

namespace carroll {

void SolverConfig::validate() const {
    auto bad = [](const std::string& what) { throw ConfigError("solver: " + what); };
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) bad("epsilon must be positive and finite");
    if (!(c0 > 0.0) || !std::isfinite(c0)) bad("c0 must be positive and finite");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) bad("t_end must be positive and finite");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) bad("cfl_safety must lie in (0, 1]");
    if (output_every < 1) bad("output_every must be a positive integer");
    if (!(tol_invariant >= 0.0)) bad("tol_invariant must be non-negative");
    if (!(dt_min > 0.0)) bad("dt_min must be positive");
}

std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "fixed_trace"; }

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::coupled_conservative: return "coupled_conservative";
        case Scheme::coupled_modified: return "coupled_modified";
        case Scheme::scalar_ri: return "scalar_ri";
    }
    return "?";
}

Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "fixed_trace") return Boundary::fixed_trace;
    throw ConfigError("unknown boundary '" + s + "' (expected periodic or fixed_trace)");
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "coupled_conservative") return Scheme::coupled_conservative;
    if (s == "coupled_modified") return Scheme::coupled_modified;
    if (s == "scalar_ri") return Scheme::scalar_ri;
    throw ConfigError("unknown scheme '" + s +
                      "' (expected coupled_conservative, coupled_modified or scalar_ri)");
}

BoundaryTrace BoundaryTrace::from_state(const FluidState& s) {
    const std::size_t n = s.sigma.size();
    return {{s.sigma.front(), s.beta.front()}, {s.sigma[n - 1], s.beta[n - 1]}};
}

namespace {

using kernels::Exec;

// Advances a pair of arrays: (sigma, beta) for the coupled schemes, (w1, w2) for scalar_ri.
class Stepper {
public:
    Stepper(const Grid1D& grid, const SolverConfig& cfg, const BoundaryTrace& trace,
            SourceFn source)
        : grid_(grid), cfg_(cfg), source_(std::move(source)) {
        const std::size_t n = static_cast<std::size_t>(grid.n_cells);
        ap_.resize(n + 2);
        bp_.resize(n + 2);
        da_.resize(n);
        db_.resize(n);
        sa_.resize(n);
        sb_.resize(n);
        if (scalar()) {
            left_ = {trace.left[0] + trace.left[1], trace.left[0] - trace.left[1]};
            right_ = {trace.right[0] + trace.right[1], trace.right[0] - trace.right[1]};
        } else {
            left_ = trace.left;
            right_ = trace.right;
        }
    }

    bool scalar() const { return cfg_.scheme == Scheme::scalar_ri; }
    bool cutoff_active() const { return cutoff_; }

    /// One midpoint step in place; t advances by the returned report's dt.
    StepReport advance(std::vector<double>& a, std::vector<double>& b, double& t,
                       double dissipation_before) {
        const double dx = grid_.dx();
        const Exec ex = cfg_.exec;
        pad(a, b);
        if (cfg_.scheme == Scheme::coupled_conservative) require_region(t, cfg_.c0 - cfg_.tol_invariant);
        if (scalar()) cutoff_ = min_pair().first < cfg_.c0 || min_pair().second < cfg_.c0;

        const double dt_stable =
            cfg_.cfl_safety * std::min(dx / max_speed(), dx * dx / (2.0 * cfg_.epsilon));
        if (!(dt_stable >= cfg_.dt_min)) {
            std::ostringstream os;
            os << "dt underflow: stable step " << dt_stable << " below dt_min " << cfg_.dt_min
               << " at t=" << t;
            throw ConfigError(os.str());
        }
        const double dt = std::min(dt_stable, cfg_.t_end - t);

        // Left-rule dissipation increment from the pre-state.
        double grad = kernels::central_gradient_sq_sum(ap_, bp_, ex) / (4.0 * dx * dx);
        if (scalar()) grad *= 0.5;  // |u_x|^2 = (w1_x^2 + w2_x^2) / 2
        const double diss = dissipation_before + cfg_.epsilon * grad * dx * dt;

        rhs(t, da_, db_);
        kernels::axpy(a, 0.5 * dt, da_, sa_, ex);
        kernels::axpy(b, 0.5 * dt, db_, sb_, ex);
        pad(sa_, sb_);
        if (cfg_.scheme == Scheme::coupled_conservative) require_region(t + 0.5 * dt, 0.0);
        rhs(t + 0.5 * dt, da_, db_);
        kernels::axpy(a, dt, da_, a, ex);
        kernels::axpy(b, dt, db_, b, ex);
        t += dt;

        StepReport rep;
        rep.t = t;
        rep.dt = dt;
        rep.visc_dissipation_cum = diss;
        rep.cutoff_flux = cutoff_;
        fill_state_metrics(a, b, rep);
        return rep;
    }

    void fill_state_metrics(const std::vector<double>& a, const std::vector<double>& b,
                            StepReport& rep) const {
        const Exec ex = cfg_.exec;
        double m1 = std::numeric_limits<double>::infinity();
        double m2 = m1;
        const long n = static_cast<long>(a.size());
        const bool sc = scalar();
        if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(min : m1, m2)
            for (long i = 0; i < n; ++i) {
                m1 = std::min(m1, sc ? a[i] : a[i] + b[i]);
                m2 = std::min(m2, sc ? b[i] : a[i] - b[i]);
            }
        } else {
            for (long i = 0; i < n; ++i) {
                m1 = std::min(m1, sc ? a[i] : a[i] + b[i]);
                m2 = std::min(m2, sc ? b[i] : a[i] - b[i]);
            }
        }
        rep.min_w1 = m1;
        rep.min_w2 = m2;
        // 0.5 (sigma^2 + beta^2) = 0.25 (w1^2 + w2^2)
        rep.l2_energy = (sc ? 0.25 : 0.5) * kernels::sq_sum(a, b, ex) * grid_.dx();
    }

private:
    void pad(const std::vector<double>& a, const std::vector<double>& b) {
        const std::size_t n = a.size();
        std::copy(a.begin(), a.end(), ap_.begin() + 1);
        std::copy(b.begin(), b.end(), bp_.begin() + 1);
        if (cfg_.boundary == Boundary::periodic) {
            ap_[0] = a[n - 1];
            bp_[0] = b[n - 1];
            ap_[n + 1] = a[0];
            bp_[n + 1] = b[0];
        } else {
            ap_[0] = left_[0];
            bp_[0] = left_[1];
            ap_[n + 1] = right_[0];
            bp_[n + 1] = right_[1];
        }
    }

    // Minimum of (w1, w2) over the padded arrays.
    std::pair<double, double> min_pair() const {
        double m1 = std::numeric_limits<double>::infinity();
        double m2 = m1;
        for (std::size_t i = 0; i < ap_.size(); ++i) {
            const double w1 = scalar() ? ap_[i] : ap_[i] + bp_[i];
            const double w2 = scalar() ? bp_[i] : ap_[i] - bp_[i];
            m1 = std::min(m1, w1);
            m2 = std::min(m2, w2);
        }
        return {m1, m2};
    }

    void require_region(double t, double level) const {
        const std::size_t n = ap_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double w1 = ap_[i] + bp_[i];
            const double w2 = ap_[i] - bp_[i];
            if (!(w1 >= level && w2 >= level) || (level <= 0.0 && !(w1 > 0.0 && w2 > 0.0))) {
                const int cell = std::clamp(static_cast<int>(i) - 1, 0, grid_.n_cells - 1);
                std::ostringstream os;
                os.precision(17);
                os << "state left the invariant region at cell " << cell << ", t=" << t
                   << ": w1=" << w1 << ", w2=" << w2 << " (level " << level << ")";
                throw InvariantViolation(os.str(), cell, t);
            }
        }
    }

    double max_speed() const {
        const long n = static_cast<long>(ap_.size());
        const double c0 = cfg_.c0;
        const bool sc = scalar();
        const bool mod = cfg_.scheme == Scheme::coupled_modified;
        const bool cut = cutoff_;
        auto speed = [&](long i) {
            const double w1 = sc ? ap_[i] : ap_[i] + bp_[i];
            const double w2 = sc ? bp_[i] : ap_[i] - bp_[i];
            if (mod || cut) return std::max(1.0 / psi_unchecked(w1, c0), 1.0 / psi_unchecked(w2, c0));
            return std::max(1.0 / w1, 1.0 / w2);
        };
        double m = 0.0;
        if (cfg_.exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(max : m)
            for (long i = 0; i < n; ++i) m = std::max(m, speed(i));
        } else {
            for (long i = 0; i < n; ++i) m = std::max(m, speed(i));
        }
        return m;
    }

    void rhs(double t, std::vector<double>& da, std::vector<double>& db) {
        const double dx = grid_.dx();
        const double eps = cfg_.epsilon;
        const Exec ex = cfg_.exec;
        switch (cfg_.scheme) {
            case Scheme::coupled_conservative:
                kernels::rhs_conservative(ap_, bp_, dx, eps, cfg_.differencing, da, db, ws_, ex);
                break;
            case Scheme::coupled_modified:
                kernels::rhs_modified(ap_, bp_, dx, eps, cfg_.c0, da, db, ex);
                break;
            case Scheme::scalar_ri:
                kernels::rhs_scalar(ap_, +1.0, dx, eps, cfg_.c0, cutoff_, cfg_.ri_form,
                                    cfg_.differencing, da, ws_, ex);
                kernels::rhs_scalar(bp_, -1.0, dx, eps, cfg_.c0, cutoff_, cfg_.ri_form,
                                    cfg_.differencing, db, ws_, ex);
                break;
        }
        if (source_) {
            for (int i = 0; i < grid_.n_cells; ++i) {
                const Vec2 s = source_(t, grid_.x(i));
                da[static_cast<std::size_t>(i)] += s[0];
                db[static_cast<std::size_t>(i)] += s[1];
            }
        }
    }

    Grid1D grid_;
    SolverConfig cfg_;
    SourceFn source_;
    Vec2 left_{}, right_{};
    bool cutoff_ = false;
    std::vector<double> ap_, bp_, da_, db_, sa_, sb_;
    kernels::Workspace ws_;
};

void check_scheme(const SolverConfig& cfg, Scheme expected, const char* who) {
    cfg.validate();
    if (cfg.scheme != expected)
        throw ConfigError(std::string(who) + " requires scheme " + to_string(expected) +
                          ", got " + to_string(cfg.scheme));
}

std::pair<FluidState, StepReport> step_fluid(const FluidState& state, const SolverConfig& cfg,
                                             const StepOptions& opts) {
    state.validate();
    Stepper st(state.grid, cfg, opts.trace.value_or(BoundaryTrace::from_state(state)),
               opts.source);
    FluidState out = state;
    const StepReport rep = st.advance(out.sigma, out.beta, out.t, opts.dissipation_before);
    return {std::move(out), rep};
}

}  // namespace

std::pair<FluidState, StepReport> step_coupled(const FluidState& state, const SolverConfig& cfg,
                                               const StepOptions& opts) {
    check_scheme(cfg, Scheme::coupled_conservative, "step_coupled");
    return step_fluid(state, cfg, opts);
}

std::pair<FluidState, StepReport> step_modified(const FluidState& state, const SolverConfig& cfg,
                                                const StepOptions& opts) {
    check_scheme(cfg, Scheme::coupled_modified, "step_modified");
    return step_fluid(state, cfg, opts);
}

std::pair<RiemannState, StepReport> step_scalar_ri(const RiemannState& rs,
                                                   const SolverConfig& cfg,
                                                   const StepOptions& opts) {
    check_scheme(cfg, Scheme::scalar_ri, "step_scalar_ri");
    const FluidState as_fluid = from_riemann(rs);
    as_fluid.validate();
    Stepper st(rs.grid, cfg, opts.trace.value_or(BoundaryTrace::from_state(as_fluid)),
               opts.source);
    RiemannState out = rs;
    const StepReport rep = st.advance(out.w1, out.w2, out.t, opts.dissipation_before);
    return {std::move(out), rep};
}

double stable_dt(const FluidState& state, const SolverConfig& cfg) {
    cfg.validate();
    double m = 0.0;
    const bool cut = cfg.scheme == Scheme::coupled_modified ||
                     (cfg.scheme == Scheme::scalar_ri && admissibility_margin(state) < cfg.c0);
    for (std::size_t i = 0; i < state.sigma.size(); ++i) {
        const double w1 = state.sigma[i] + state.beta[i];
        const double w2 = state.sigma[i] - state.beta[i];
        m = std::max(m, cut ? std::max(1.0 / psi_unchecked(w1, cfg.c0), 1.0 / psi_unchecked(w2, cfg.c0))
                            : std::max(1.0 / w1, 1.0 / w2));
    }
    const double dx = state.grid.dx();
    return cfg.cfl_safety * std::min(dx / m, dx * dx / (2.0 * cfg.epsilon));
}

Trajectory run(const FluidState& state0, const SolverConfig& cfg, const RunOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();
    state0.validate();
    if (cfg.scheme == Scheme::coupled_conservative) {
        const AdmissibilityReport adm = check_admissible(state0, cfg.c0);
        if (!adm.admissible) {
            std::ostringstream os;
            os << "initial data not admissible at c0=" << cfg.c0 << ": first bad cell "
               << adm.first_bad_cell << " (min w1=" << adm.min_w1 << ", min w2=" << adm.min_w2
               << ")";
            throw InvariantViolation(os.str(), adm.first_bad_cell, state0.t);
        }
    }

    Trajectory tr;
    tr.config = cfg;
    const BoundaryTrace trace = opts.trace.value_or(BoundaryTrace::from_state(state0));
    tr.trace = trace;
    Stepper st(state0.grid, cfg, trace, opts.source);
    const bool sc = cfg.scheme == Scheme::scalar_ri;

    std::vector<double> a, b;
    if (sc) {
        const RiemannState rs = to_riemann(state0);
        a = rs.w1;
        b = rs.w2;
    } else {
        a = state0.sigma;
        b = state0.beta;
    }
    auto snapshot = [&](double t) {
        if (!sc) {
            FluidState s{state0.grid, t, a, b};
            return s;
        }
        return from_riemann(RiemannState{state0.grid, t, a, b});
    };

    StepReport init;
    init.t = state0.t;
    st.fill_state_metrics(a, b, init);
    tr.initial_l2_energy = init.l2_energy;
    tr.sup_l2_energy = init.l2_energy;
    tr.min_w1_overall = init.min_w1;
    tr.min_w2_overall = init.min_w2;
    tr.snapshots.push_back(snapshot(state0.t));

    double t = state0.t;
    double since_snapshot = 0.0;
    double diss = 0.0;
    bool cutoff_logged = false;
    const double t_end = cfg.t_end;
    while (t_end - t > 1e-14 * std::max(1.0, t_end)) {
        const StepReport rep = st.advance(a, b, t, diss);
        diss = rep.visc_dissipation_cum;
        ++tr.steps;
        since_snapshot += rep.dt;
        tr.reports.push_back(rep);
        tr.min_w1_overall = std::min(tr.min_w1_overall, rep.min_w1);
        tr.min_w2_overall = std::min(tr.min_w2_overall, rep.min_w2);
        tr.sup_l2_energy = std::max(tr.sup_l2_energy, rep.l2_energy);
        if (rep.cutoff_flux != cutoff_logged) {
            std::ostringstream os;
            os << "step " << tr.steps << " t=" << rep.t << ": scalar flux switched to "
               << (rep.cutoff_flux ? "cutoff primitive h" : "ln");
            tr.log.push_back(os.str());
            cutoff_logged = rep.cutoff_flux;
        }
        if (!std::isfinite(rep.l2_energy))
            throw NumericalError("non-finite state at t=" + std::to_string(rep.t));
        const bool last = !(t_end - t > 1e-14 * std::max(1.0, t_end));
        if (tr.steps % cfg.output_every == 0 || last) {
            tr.weights.push_back(since_snapshot);
            since_snapshot = 0.0;
            tr.snapshots.push_back(snapshot(t));
        }
    }
    tr.weights.push_back(0.0);
    tr.cum_dissipation = diss;
    tr.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return tr;
}

}  // namespace carroll
