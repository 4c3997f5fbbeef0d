/// @file analysis.hpp
/// @brief Post-hoc audits over stored trajectories.
///
/// All space-time integrals use the trapezoidal rule on the snapshot lattice:
/// weight dx per cell in x (test functions vanish at the domain edge) and the
/// trapezoid weights of the snapshot times in t. Spatial derivatives of the
/// stored states are central differences with the run's own ghost cells.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "carroll/entropy.hpp"
#include "carroll/solver.hpp"

namespace carroll {

struct SpaceTimeTestFunction {
    std::function<double(double, double)> phi, phi_t, phi_x, phi_xx;  ///< arguments (t, x)
    /// Closed support box [t_lo, t_hi] x [x_lo, x_hi]; phi vanishes outside it.
    double t_lo = 0.0, t_hi = 0.0, x_lo = 0.0, x_hi = 0.0;
    bool compact = true;
    bool nonnegative = true;
    std::string id;

    static SpaceTimeTestFunction zero();
};

/// Smooth one-dimensional bump on (a, b), normalised to peak 1 at the midpoint:
/// exp(4 + 1/(z (z - 1))) with z = (y - a)/(b - a). Derivative order 0, 1 or 2.
double bump_1d(double y, double a, double b, int derivative = 0);

/// Tensor product of two bumps on (t_a, t_b) x (x_a, x_b).
SpaceTimeTestFunction tensor_bump(double t_a, double t_b, double x_a, double x_b,
                                  std::string id);

/// Nine bumps: t-support [0.1 T, 0.9 T] of the window, x-widths {0.2, 0.3, 0.4} L
/// and centres {0.3, 0.5, 0.7} L.
std::vector<SpaceTimeTestFunction> bump_battery(double t0, double t1, const Grid1D& grid);

struct KineticMeasureHistogram {
    std::vector<double> s_edges;  ///< bins + 1 ordered edges
    std::vector<double> mu1;      ///< per-bin nonnegative mass
    std::vector<double> mu2;      ///< per-bin signed mass
    double t_lo = 0.0, t_hi = 0.0, x_lo = 0.0, x_hi = 0.0;
    /// Extremes of beta - sigma and beta + sigma over the window.
    double s_min = 0.0, s_max = 0.0;
    /// Smallest and largest s at which any nonzero mass was deposited.
    double support_lo = 0.0, support_hi = 0.0;

    double total_mu1() const;
    double total_mu2() const;
};

/// Deposits eps (sigma_x - beta_x)^2 dx w_k at s = beta - sigma and
/// eps (sigma_x + beta_x)^2 dx w_k at s = beta + sigma, where w_k is the
/// snapshot's forward time weight. mu1 takes the sum, mu2 the difference.
KineticMeasureHistogram kinetic_measures(const Trajectory& traj, int bins);

struct DissipationField {
    int n_times = 0;          ///< interior snapshots used
    int n_cells = 0;
    std::vector<double> t;    ///< snapshot times
    std::vector<double> lhs;  ///< d_t eta(u) + d_x q(u), row-major (time, cell)
    std::vector<double> rhs;  ///< eps d_xx eta(u) - eps u_x^T Hess(eta) u_x
    std::vector<double> dissipation;  ///< the term -eps u_x^T Hess(eta) u_x alone
    double l1_difference = 0.0;       ///< trapezoid L1 norm of lhs - rhs
    double l1_lhs = 0.0;
};

/// Both sides of the entropy dissipation identity on snapshots 1 .. K-2.
DissipationField entropy_dissipation_field(const Trajectory& traj, const EntropyPairEval& pair);

/// int int (u phi_t + F(u) phi_x) dx dt + int u0 phi(t0, .) dx.
Vec2 weak_residual(const Trajectory& traj, const SpaceTimeTestFunction& phi);

/// int int (eta(u) phi_t + q(u) phi_x) dx dt, without any checks.
double entropy_integral(const Trajectory& traj, const EntropyPairEval& pair,
                        const SpaceTimeTestFunction& phi);

/// entropy_integral after checking phi >= 0, compact support inside the window,
/// and convexity of the pair on the trajectory's range (random scan seeded by
/// `seed`). Violations throw InputError.
double entropy_inequality_check(const Trajectory& traj, const EntropyPairEval& pair,
                                const SpaceTimeTestFunction& phi, unsigned seed = 12345);

struct EntropyAudit {
    std::string pair;
    std::string phi;
    double value = 0.0;
    double c_pair = 0.0;     ///< sup |eta(u)| * ||phi_xx||_L1
    double threshold = 0.0;  ///< c_pair * (sqrt(eps) + dx^2)
    bool pass = false;
};

/// Runs entropy_inequality_check and compares with the calibrated tolerance.
EntropyAudit audit_entropy_inequality(const Trajectory& traj, const EntropyPairEval& pair,
                                      const SpaceTimeTestFunction& phi, unsigned seed = 12345);

/// Convexity certificate of `pair` on the bounding box of the trajectory's states.
ConvexityCertificate certify_on_trajectory(const Trajectory& traj, const EntropyPairEval& pair,
                                           unsigned seed = 12345);

struct Window {
    double x_lo = 0.0;
    double x_hi = 0.0;
    /// Middle 80% of the grid.
    static Window interior(const Grid1D& grid);
};

enum class SweepKind { epsilon, dx };

struct ConvergenceReport {
    SweepKind kind = SweepKind::epsilon;
    std::vector<double> parameters;      ///< eps or dx per run, in sweep order
    std::vector<double> l1_differences;  ///< between consecutive runs
    std::vector<double> rates;           ///< log(d_k / d_{k+1}) / log(p_k / p_{k+1})
    bool monotone_decreasing = false;
    /// Three-grid order log2(d_0 / d_1) for dx sweeps (NaN otherwise).
    double observed_order = 0.0;
    Window window;
};

/// L1 differences of the final states over `window`. Epsilon sweeps require
/// identical grids; dx sweeps require n_cells to double and are compared after
/// averaging the finer state onto the coarser grid. Throws InputError on
/// mismatched grids, end times or windows.
ConvergenceReport convergence_metrics(const std::vector<const Trajectory*>& trajs,
                                      SweepKind kind, std::optional<Window> window = {});

/// Least-squares slope of log(y) against log(x). Requires positive data.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Cell-pair averaging of a state onto the grid with half as many cells.
FluidState restrict_to_coarse(const FluidState& fine);

}  // namespace carroll
