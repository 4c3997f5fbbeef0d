/// @file solver.hpp
/// @brief Explicit midpoint time integration of the viscous Carrollian system.
///
/// Three discretisations share one stepping rule:
///   - coupled_conservative: u_t + F(u)_x = eps u_xx, central flux differences;
///   - coupled_modified:     u_t + M(u) u_x = eps u_xx with the cutoff matrix M;
///   - scalar_ri:            w1_t + (ln w1)_x = eps w1_xx, w2_t - (ln w2)_x = eps w2_xx.
///
/// The step size is dt = cfl_safety * min(dx / max|lambda|, dx^2 / (2 eps)),
/// clipped so the run lands on t_end.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "carroll/flux.hpp"
#include "carroll/kernels.hpp"
#include "carroll/phase.hpp"

namespace carroll {

enum class Boundary { periodic, fixed_trace };
enum class Scheme { coupled_conservative, coupled_modified, scalar_ri };

struct SolverConfig {
    double epsilon = 0.01;
    double c0 = 1.0;
    double t_end = 1.0;
    double cfl_safety = 0.4;
    Boundary boundary = Boundary::periodic;
    Scheme scheme = Scheme::coupled_conservative;
    int output_every = 1;
    double tol_invariant = 1e-8;
    /// Steps shorter than this (before clipping to t_end) are a configuration error.
    double dt_min = 1e-12;
    kernels::Differencing differencing = kernels::Differencing::flux_form;
    kernels::ScalarForm ri_form = kernels::ScalarForm::conservative;
    kernels::Exec exec = kernels::Exec::parallel;

    /// Throws ConfigError on epsilon <= 0, c0 <= 0, t_end <= 0, cfl outside (0,1], ...
    void validate() const;
};

std::string to_string(Boundary b);
std::string to_string(Scheme s);
Boundary boundary_from_string(const std::string& s);
Scheme scheme_from_string(const std::string& s);

struct StepReport {
    double t = 0.0;   ///< time after the step
    double dt = 0.0;
    double min_w1 = 0.0;
    double min_w2 = 0.0;
    double l2_energy = 0.0;
    double visc_dissipation_cum = 0.0;  ///< int_0^t int eps |u_x|^2, left rule in time
    bool cutoff_flux = false;           ///< scalar_ri used h instead of ln during this step
};

/// Ghost values (sigma, beta) used on both sides under fixed_trace.
struct BoundaryTrace {
    Vec2 left{};
    Vec2 right{};
    static BoundaryTrace from_state(const FluidState& s);
};

/// Source term added to the right-hand side, evaluated at (t, x_i). For
/// scalar_ri the components are the w1 and w2 sources; otherwise sigma and beta.
using SourceFn = std::function<Vec2(double t, double x)>;

struct StepOptions {
    /// Required ghost values for fixed_trace; defaults to the state's own edge values.
    std::optional<BoundaryTrace> trace;
    SourceFn source;
    /// Cumulative dissipation carried into the step report.
    double dissipation_before = 0.0;
};

/// Throws InvariantViolation when the pre-state leaves {w1, w2 >= c0 - tol_invariant}.
std::pair<FluidState, StepReport> step_coupled(const FluidState& state, const SolverConfig& cfg,
                                               const StepOptions& opts = {});
std::pair<FluidState, StepReport> step_modified(const FluidState& state, const SolverConfig& cfg,
                                                const StepOptions& opts = {});
std::pair<RiemannState, StepReport> step_scalar_ri(const RiemannState& rs,
                                                   const SolverConfig& cfg,
                                                   const StepOptions& opts = {});

struct Trajectory {
    SolverConfig config;
    BoundaryTrace trace;  ///< ghost values used under fixed_trace
    std::vector<FluidState> snapshots;
    /// Sum of step sizes from each snapshot to the next; 0 for the last one.
    std::vector<double> weights;
    std::vector<StepReport> reports;
    long steps = 0;
    double min_w1_overall = 0.0;
    double min_w2_overall = 0.0;
    double initial_l2_energy = 0.0;
    double sup_l2_energy = 0.0;
    double cum_dissipation = 0.0;
    double wallclock_s = 0.0;
    std::vector<std::string> log;

    const FluidState& initial() const { return snapshots.front(); }
    const FluidState& final_state() const { return snapshots.back(); }
};

struct RunOptions {
    std::optional<BoundaryTrace> trace;  ///< defaults to the initial state's edge values
    SourceFn source;
};

/// Integrates state0 to cfg.t_end, keeping a snapshot every cfg.output_every
/// steps plus the initial and final states.
Trajectory run(const FluidState& state0, const SolverConfig& cfg, const RunOptions& opts = {});

/// dx / max|lambda| for the given scheme, with the diffusive limit folded in.
double stable_dt(const FluidState& state, const SolverConfig& cfg);

}  // namespace carroll
