/// @file entropy.hpp
/// @brief Entropy pairs generated from test functions (f, g) in A x B.
///
/// Every solution of the wave equation eta_ss - eta_bb = 0 is an entropy. The
/// d'Alembert representation splits them into two families:
///
///   eta1 = f(beta - sigma) + f(beta + sigma),
///   q1   = K(beta + sigma) + K(beta - sigma),     K(x) = int_0^x f'(s)/s ds,
///
///   eta2 = int_{beta-sigma}^{beta+sigma} g(s) ds,
///   q2   = int_{beta-sigma}^{beta+sigma} g(s)/s ds.
///
/// q1 is the kernel form int sgn(s - beta) f'(s)/s + 2 int_0^beta f'(s)/s
/// regrouped; integrals with a reversed range are signed. The integrands are
/// continuous once their s = 0 value is patched to f''(0) (resp. g'(0)), which
/// needs f'(0) = 0 (f in A) and g(0) = 0 (g in B).
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "carroll/flux.hpp"
#include "carroll/quadrature.hpp"

namespace carroll {

using ScalarFn = std::function<double(double)>;
using PhaseFn = std::function<double(double, double)>;

struct TestFunctionPair {
    ScalarFn f, fp, fpp;  ///< f and its first two derivatives; empty means f = 0
    ScalarFn g, gp;       ///< g and its derivative; empty means g = 0
    std::string label;

    bool has_f() const { return static_cast<bool>(f); }
    bool has_g() const { return static_cast<bool>(g); }

    static TestFunctionPair from_f(ScalarFn f, ScalarFn fp, ScalarFn fpp, std::string label);
    static TestFunctionPair from_g(ScalarFn g, ScalarFn gp, std::string label);
};

struct TestPairReport {
    double f_prime_at_zero = 0.0;
    double g_at_zero = 0.0;
    double max_abs_fpp = 0.0;  ///< sup |f''| over the scan interval
    double max_abs_gp = 0.0;   ///< sup |g'| over the scan interval
    double scan_radius = 0.0;
};

/// Checks f'(0) = 0 and g(0) = 0 to 1e-12 and that f'' and g' are bounded on
/// [-radius, radius]. Throws AdmissibilityError naming the failed condition.
TestPairReport validate_test_pair(const TestFunctionPair& tp, double radius = 10.0);

struct EntropyPairEval {
    PhaseFn eta;
    PhaseFn q;
    std::function<Vec2(double, double)> grad_eta;  ///< optional closed form
    std::function<Vec2(double, double)> grad_q;    ///< optional closed form
    std::function<Mat2(double, double)> hess_eta;  ///< optional closed form
    std::string provenance;

    /// Closed form when present, otherwise fourth-order central differences.
    Vec2 gradient_eta(double sigma, double beta) const;
    Vec2 gradient_q(double sigma, double beta) const;
    Mat2 hessian_eta(double sigma, double beta) const;
};

enum class Validation { enforce, skip };

EntropyPairEval make_entropy_pair_1(const TestFunctionPair& tp,
                                    Validation v = Validation::enforce,
                                    const QuadratureOptions& quad = {});
EntropyPairEval make_entropy_pair_2(const TestFunctionPair& tp,
                                    Validation v = Validation::enforce,
                                    const QuadratureOptions& quad = {});
/// eta1 + eta2 for whichever of f, g are present.
EntropyPairEval make_entropy_pair(const TestFunctionPair& tp, const QuadratureOptions& quad = {});

EntropyPairEval sum(const EntropyPairEval& a, const EntropyPairEval& b);
EntropyPairEval scaled(const EntropyPairEval& p, double c);

/// (eta*, q*) = ((sigma^2 + beta^2)/2, beta) written out directly.
EntropyPairEval special_pair_closed_form();

/// sigma (beta^2 - sigma^2)^2 (eta_ss - eta_bb) with second-order central
/// differences of eta at the power of two nearest `step`. For a wave solution
/// the even-order truncation terms of both directions coincide, so only
/// rounding remains and a coarse default step minimises it.
double entropy_equation_residual(const EntropyPairEval& pair, double sigma, double beta,
                                 double step = 1e-2);

/// grad q - grad eta . grad F using fourth-order central differences of q and eta.
Vec2 entropy_compatibility_residual(const EntropyPairEval& pair, double sigma, double beta,
                                    double step = 1e-3);

struct ConvexityCertificate {
    bool convex = false;
    double min_eigenvalue = 0.0;
    double at_sigma = 0.0;
    double at_beta = 0.0;
    int points_checked = 0;
};

/// Scans the smallest Hessian eigenvalue of eta over an n x n lattice on the
/// box plus `random_points` seeded samples; points outside sigma > |beta| are skipped.
ConvexityCertificate certify_convexity(const EntropyPairEval& pair, double sigma_lo,
                                       double sigma_hi, double beta_lo, double beta_hi,
                                       int n = 21, int random_points = 200,
                                       unsigned seed = 12345);

/// Built-in generators: "special", "quartic", "linear-g", "quadratic-g",
/// "cubic-g", plus the concave negative control "concave-control" (-eta*, -q*).
std::vector<std::string> catalog_names();
bool in_catalog(const std::string& name);
TestFunctionPair catalog_test_pair(const std::string& name);
EntropyPairEval catalog_pair(const std::string& name);

}  // namespace carroll
