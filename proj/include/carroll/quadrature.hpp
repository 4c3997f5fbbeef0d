/// @file quadrature.hpp
/// @brief Adaptive Simpson quadrature with an absolute tolerance.
#pragma once

#include <functional>

namespace carroll {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int min_depth = 2;
    int max_depth = 48;
};

/// Integrates f over [a, b] (a > b allowed, giving the signed integral).
/// Uses the Richardson-corrected Simpson estimate on accepted panels.
/// Throws NumericalError naming the offending sub-interval if the recursion
/// depth is exhausted or the integrand produces a non-finite value.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {});

}  // namespace carroll
