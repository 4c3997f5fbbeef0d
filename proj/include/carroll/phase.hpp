/// @file phase.hpp
/// @brief Grid, fluid state, Riemann-invariant coordinates and admissibility.
///
/// States store cell-centred point values. The phase-space variables are the
/// Carrollian stress sigma and inverse velocity beta; the Riemann invariants
/// are w1 = sigma + beta and w2 = sigma - beta, and a state is admissible at
/// level c0 when both are >= c0 everywhere.
#pragma once

#include <span>
#include <vector>

namespace carroll {

struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 4;

    /// Validating constructor: n_cells >= 4 and x_min < x_max.
    static Grid1D make(double x_min, double x_max, int n_cells);

    double dx() const { return (x_max - x_min) / n_cells; }
    double length() const { return x_max - x_min; }
    /// Centre of cell i.
    double x(int i) const { return x_min + (i + 0.5) * dx(); }

    bool operator==(const Grid1D&) const = default;
};

struct FluidState {
    Grid1D grid;
    double t = 0.0;
    std::vector<double> sigma;
    std::vector<double> beta;

    /// Zero-initialised state of the right size.
    static FluidState zeros(const Grid1D& grid, double t = 0.0);
    /// Throws ParameterError if sizes mismatch the grid or any value is non-finite.
    void validate() const;
    int size() const { return grid.n_cells; }
};

struct RiemannState {
    Grid1D grid;
    double t = 0.0;
    std::vector<double> w1;
    std::vector<double> w2;
};

struct AdmissibilityReport {
    double c0 = 0.0;
    double min_w1 = 0.0;
    double min_w2 = 0.0;
    bool admissible = false;
    /// First cell where w1 or w2 falls below c0, -1 if none.
    int first_bad_cell = -1;
};

RiemannState to_riemann(const FluidState& state);
FluidState from_riemann(const RiemannState& rs);

AdmissibilityReport check_admissible(const FluidState& state, double c0);

/// min over cells of sigma - |beta| (= min(min w1, min w2)).
double admissibility_margin(const FluidState& state);

/// Generalised Carrollian pressure from the equipartition law with gamma = 3:
/// varpi = sigma beta^2 / 2 + sigma^3 / 6.
std::vector<double> compute_varpi(const FluidState& state);
double varpi(double sigma, double beta);

/// 0.5 * sum (sigma^2 + beta^2) dx, the integral of the special entropy.
double l2_energy(const FluidState& state);

}  // namespace carroll
