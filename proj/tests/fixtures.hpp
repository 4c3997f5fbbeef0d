/// @file fixtures.hpp
/// @brief Shared initial data and manufactured solutions for the test binaries.
#pragma once

#include <cmath>

#include "carroll/flux.hpp"
#include "carroll/phase.hpp"
#include "carroll/solver.hpp"

namespace carroll::fixtures {

inline FluidState demo(int n) {
    FluidState s = FluidState::zeros(Grid1D::make(0.0, 1.0, n));
    for (int i = 0; i < n; ++i) {
        const double x = s.grid.x(i);
        s.sigma[i] = 2.0 + 0.5 * std::sin(2.0 * M_PI * x);
        s.beta[i] = 0.5 * std::cos(2.0 * M_PI * x);
    }
    return s;
}

inline FluidState constant(int n, double sigma, double beta) {
    FluidState s = FluidState::zeros(Grid1D::make(0.0, 1.0, n));
    std::fill(s.sigma.begin(), s.sigma.end(), sigma);
    std::fill(s.beta.begin(), s.beta.end(), beta);
    return s;
}

/// sigma = 2 + 0.1 sin(2 pi (x - t)), beta = 0.5 + 0.1 cos(2 pi x).
struct Manufactured {
    double eps = 0.01;

    Vec2 exact(double t, double x) const {
        return {2.0 + 0.1 * std::sin(2 * M_PI * (x - t)), 0.5 + 0.1 * std::cos(2 * M_PI * x)};
    }

    /// u_t + J(u) u_x - eps u_xx, evaluated analytically.
    Vec2 source(double t, double x) const {
        const Vec2 u = exact(t, x);
        const double st = -0.2 * M_PI * std::cos(2 * M_PI * (x - t));
        const double sx = -st;
        const double sxx = -0.4 * M_PI * M_PI * std::sin(2 * M_PI * (x - t));
        const double bx = -0.2 * M_PI * std::sin(2 * M_PI * x);
        const double bxx = -0.4 * M_PI * M_PI * std::cos(2 * M_PI * x);
        const Vec2 fx = jacobian_F(u[0], u[1]) * Vec2{sx, bx};
        return {st + fx[0] - eps * sxx, fx[1] - eps * bxx};
    }

    /// Source for the Riemann-invariant pair (w1, w2).
    Vec2 source_ri(double t, double x) const {
        const Vec2 s = source(t, x);
        return {s[0] + s[1], s[0] - s[1]};
    }

    FluidState initial(int n) const {
        FluidState s = FluidState::zeros(Grid1D::make(0.0, 1.0, n));
        for (int i = 0; i < n; ++i) {
            const Vec2 u = exact(0.0, s.grid.x(i));
            s.sigma[i] = u[0];
            s.beta[i] = u[1];
        }
        return s;
    }

    /// L-infinity error of a run to t_end on n cells.
    double error(Scheme scheme, int n, double t_end) const {
        SolverConfig cfg;
        cfg.epsilon = eps;
        cfg.t_end = t_end;
        cfg.scheme = scheme;
        cfg.output_every = 1 << 30;
        RunOptions opts;
        if (scheme == Scheme::scalar_ri)
            opts.source = [this](double t, double x) { return source_ri(t, x); };
        else
            opts.source = [this](double t, double x) { return source(t, x); };
        const Trajectory tr = run(initial(n), cfg, opts);
        const FluidState& f = tr.final_state();
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vec2 u = exact(f.t, f.grid.x(i));
            m = std::max({m, std::fabs(u[0] - f.sigma[i]), std::fabs(u[1] - f.beta[i])});
        }
        return m;
    }
};

inline double linf_gap(const FluidState& a, const FluidState& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i)
        m = std::max({m, std::fabs(a.sigma[i] - b.sigma[i]), std::fabs(a.beta[i] - b.beta[i])});
    return m;
}

}  // namespace carroll::fixtures
