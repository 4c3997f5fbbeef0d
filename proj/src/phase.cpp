#include "carroll/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "carroll/errors.hpp"

namespace carroll {

Grid1D Grid1D::make(double x_min, double x_max, int n_cells) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw ParameterError("grid: require finite x_min < x_max");
    }
    if (n_cells < 4) {
        throw ParameterError("grid: n_cells must be >= 4, got " + std::to_string(n_cells));
    }
    return Grid1D{x_min, x_max, n_cells};
}

FluidState FluidState::zeros(const Grid1D& grid, double t) {
    FluidState s;
    s.grid = grid;
    s.t = t;
    s.sigma.assign(grid.n_cells, 0.0);
    s.beta.assign(grid.n_cells, 0.0);
    return s;
}

void FluidState::validate() const {
    const auto n = static_cast<std::size_t>(grid.n_cells);
    if (sigma.size() != n || beta.size() != n) {
        throw ParameterError("state: sigma/beta must have exactly n_cells entries");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(sigma[i]) || !std::isfinite(beta[i])) {
            throw ParameterError("state: non-finite value at cell " + std::to_string(i));
        }
    }
}

RiemannState to_riemann(const FluidState& state) {
    RiemannState rs;
    rs.grid = state.grid;
    rs.t = state.t;
    const std::size_t n = state.sigma.size();
    rs.w1.resize(n);
    rs.w2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rs.w1[i] = state.sigma[i] + state.beta[i];
        rs.w2[i] = state.sigma[i] - state.beta[i];
    }
    return rs;
}

FluidState from_riemann(const RiemannState& rs) {
    FluidState s;
    s.grid = rs.grid;
    s.t = rs.t;
    const std::size_t n = rs.w1.size();
    s.sigma.resize(n);
    s.beta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.sigma[i] = 0.5 * (rs.w1[i] + rs.w2[i]);
        s.beta[i] = 0.5 * (rs.w1[i] - rs.w2[i]);
    }
    return s;
}

AdmissibilityReport check_admissible(const FluidState& state, double c0) {
    if (!(c0 > 0.0) || !std::isfinite(c0)) {
        throw ParameterError("check_admissible: c0 must be positive");
    }
    AdmissibilityReport r;
    r.c0 = c0;
    r.min_w1 = std::numeric_limits<double>::infinity();
    r.min_w2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.sigma.size(); ++i) {
        const double w1 = state.sigma[i] + state.beta[i];
        const double w2 = state.sigma[i] - state.beta[i];
        r.min_w1 = std::min(r.min_w1, w1);
        r.min_w2 = std::min(r.min_w2, w2);
        if (r.first_bad_cell < 0 && (w1 < c0 || w2 < c0)) r.first_bad_cell = static_cast<int>(i);
    }
    r.admissible = r.min_w1 >= c0 && r.min_w2 >= c0;
    return r;
}

double admissibility_margin(const FluidState& state) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.sigma.size(); ++i) {
        m = std::min(m, state.sigma[i] - std::abs(state.beta[i]));
    }
    return m;
}

double varpi(double sigma, double beta) {
    return 0.5 * sigma * beta * beta + sigma * sigma * sigma / 6.0;
}

std::vector<double> compute_varpi(const FluidState& state) {
    std::vector<double> out(state.sigma.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = varpi(state.sigma[i], state.beta[i]);
    return out;
}

double l2_energy(const FluidState& state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < state.sigma.size(); ++i) {
        acc += state.sigma[i] * state.sigma[i] + state.beta[i] * state.beta[i];
    }
    return 0.5 * acc * state.grid.dx();
}

}  // namespace carroll
