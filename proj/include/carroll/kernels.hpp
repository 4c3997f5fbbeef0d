/// @file kernels.hpp
/// @brief Per-cell right-hand-side kernels for the three viscous discretisations.
///
/// Every kernel has a serial reference loop and an OpenMP loop selected by
/// Exec. Both run the same per-cell arithmetic, so results are bit-identical;
/// reductions go through fixed-size blocks whose partial sums are combined in
/// block order, independent of the thread count.
///
/// Inputs are padded arrays of length n + 2: index 0 and n + 1 are ghost cells
/// filled by the caller according to the boundary mode.
#pragma once

#include <span>
#include <vector>

namespace carroll::kernels {

enum class Exec { serial, parallel };

/// Central flux difference written as (F_{i+1/2} - F_{i-1/2}) / dx with
/// F_{i+1/2} = (F_i + F_{i+1}) / 2, or pointwise as (F_{i+1} - F_{i-1}) / (2 dx).
enum class Differencing { flux_form, pointwise };

/// Which spatial form the scalar Riemann-invariant equations use.
enum class ScalarForm { conservative, characteristic };

/// Reusable buffers for flux values at the n + 2 padded points and the n + 1 faces.
struct Workspace {
    std::vector<double> f1, f2;
    std::vector<double> face1, face2;
    void resize(std::size_t padded);
};

/// d(sigma,beta)/dt = -F(u)_x + eps u_xx. Requires sigma > |beta| at every padded point.
void rhs_conservative(std::span<const double> sigma_p, std::span<const double> beta_p, double dx,
                      double eps, Differencing diff, std::span<double> dsigma,
                      std::span<double> dbeta, Workspace& ws, Exec exec);

/// d(sigma,beta)/dt = -M(u) u_x + eps u_xx with central u_x; defined everywhere.
void rhs_modified(std::span<const double> sigma_p, std::span<const double> beta_p, double dx,
                  double eps, double c0, std::span<double> dsigma, std::span<double> dbeta,
                  Exec exec);

/// dw/dt = -orient * H(w)_x + eps w_xx with orient = +1 for w1 and -1 for w2.
/// H = ln unless use_cutoff, in which case H = h (the primitive of 1/psi_c0).
/// The characteristic form uses H'(w_i) (w_{i+1} - w_{i-1}) / (2 dx).
void rhs_scalar(std::span<const double> w_p, double orient, double dx, double eps, double c0,
                bool use_cutoff, ScalarForm form, Differencing diff, std::span<double> dw,
                Workspace& ws, Exec exec);

/// out[i] = a[i] + c * b[i].
void axpy(std::span<const double> a, double c, std::span<const double> b, std::span<double> out,
          Exec exec);

/// Deterministic blocked sums.
double blocked_sum(std::span<const double> v, Exec exec);
/// sum_i ((a_{i+1} - a_{i-1})^2 + (b_{i+1} - b_{i-1})^2) over interior cells of padded arrays.
double central_gradient_sq_sum(std::span<const double> a_p, std::span<const double> b_p,
                               Exec exec);
/// sum_i (a_i^2 + b_i^2).
double sq_sum(std::span<const double> a, std::span<const double> b, Exec exec);

/// max over padded points of max(1/(sigma - beta), 1/(sigma + beta)) (coupled speeds).
double max_speed_coupled(std::span<const double> sigma_p, std::span<const double> beta_p,
                         Exec exec);

constexpr std::size_t kBlock = 256;

}  // namespace carroll::kernels
