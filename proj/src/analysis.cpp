#include "carroll/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carroll/errors.hpp"

namespace carroll {

SpaceTimeTestFunction SpaceTimeTestFunction::zero() {
    SpaceTimeTestFunction z;
    auto nil = [](double, double) { return 0.0; };
    z.phi = z.phi_t = z.phi_x = z.phi_xx = nil;
    z.compact = true;
    z.nonnegative = true;
    z.id = "zero";
    return z;
}

double bump_1d(double y, double a, double b, int derivative) {
    const double len = b - a;
    const double z = (y - a) / len;
    if (!(z > 0.0 && z < 1.0)) return 0.0;
    const double d = z * z - z;
    const double p = 1.0 / d;
    if (4.0 + p < -700.0) return 0.0;
    const double v = std::exp(4.0 + p);
    if (derivative == 0) return v;
    const double p1 = -(2.0 * z - 1.0) / (d * d);
    if (derivative == 1) return v * p1 / len;
    const double p2 = -2.0 / (d * d) + 2.0 * (2.0 * z - 1.0) * (2.0 * z - 1.0) / (d * d * d);
    return v * (p1 * p1 + p2) / (len * len);
}

SpaceTimeTestFunction tensor_bump(double t_a, double t_b, double x_a, double x_b,
                                  std::string id) {
    if (!(t_a < t_b) || !(x_a < x_b)) throw InputError("tensor_bump: empty support box");
    SpaceTimeTestFunction f;
    f.phi = [=](double t, double x) { return bump_1d(t, t_a, t_b) * bump_1d(x, x_a, x_b); };
    f.phi_t = [=](double t, double x) { return bump_1d(t, t_a, t_b, 1) * bump_1d(x, x_a, x_b); };
    f.phi_x = [=](double t, double x) { return bump_1d(t, t_a, t_b) * bump_1d(x, x_a, x_b, 1); };
    f.phi_xx = [=](double t, double x) { return bump_1d(t, t_a, t_b) * bump_1d(x, x_a, x_b, 2); };
    f.t_lo = t_a;
    f.t_hi = t_b;
    f.x_lo = x_a;
    f.x_hi = x_b;
    f.compact = true;
    f.nonnegative = true;
    f.id = std::move(id);
    return f;
}

std::vector<SpaceTimeTestFunction> bump_battery(double t0, double t1, const Grid1D& grid) {
    const double T = t1 - t0;
    const double L = grid.length();
    std::vector<SpaceTimeTestFunction> out;
    for (double w : {0.2, 0.3, 0.4}) {
        for (double c : {0.3, 0.5, 0.7}) {
            std::ostringstream id;
            id << "bump_w" << w << "_c" << c;
            const double xc = grid.x_min + c * L;
            out.push_back(tensor_bump(t0 + 0.1 * T, t0 + 0.9 * T, xc - 0.5 * w * L,
                                      xc + 0.5 * w * L, id.str()));
        }
    }
    return out;
}

double KineticMeasureHistogram::total_mu1() const {
    double s = 0.0;
    for (double v : mu1) s += v;
    return s;
}

double KineticMeasureHistogram::total_mu2() const {
    double s = 0.0;
    for (double v : mu2) s += v;
    return s;
}

namespace {

void require_nonempty(const Trajectory& traj, const char* who) {
    if (traj.snapshots.empty() || traj.weights.size() != traj.snapshots.size())
        throw InputError(std::string(who) + ": empty or malformed trajectory");
}

// Values of a snapshot with one ghost cell on each side, matching the run's boundary mode.
struct Padded {
    std::vector<double> s, b;
};

Padded pad(const Trajectory& traj, const FluidState& st) {
    const std::size_t n = st.sigma.size();
    Padded p;
    p.s.resize(n + 2);
    p.b.resize(n + 2);
    std::copy(st.sigma.begin(), st.sigma.end(), p.s.begin() + 1);
    std::copy(st.beta.begin(), st.beta.end(), p.b.begin() + 1);
    if (traj.config.boundary == Boundary::periodic) {
        p.s[0] = st.sigma[n - 1];
        p.b[0] = st.beta[n - 1];
        p.s[n + 1] = st.sigma[0];
        p.b[n + 1] = st.beta[0];
    } else {
        p.s[0] = traj.trace.left[0];
        p.b[0] = traj.trace.left[1];
        p.s[n + 1] = traj.trace.right[0];
        p.b[n + 1] = traj.trace.right[1];
    }
    return p;
}

// Trapezoid weights of the snapshot times.
std::vector<double> time_weights(const Trajectory& traj) {
    const std::size_t k = traj.snapshots.size();
    std::vector<double> w(k, 0.0);
    for (std::size_t j = 0; j + 1 < k; ++j) {
        const double h = traj.snapshots[j + 1].t - traj.snapshots[j].t;
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    return w;
}

bool inside_time(const SpaceTimeTestFunction& phi, double t) {
    return !phi.compact || (t >= phi.t_lo && t <= phi.t_hi);
}

bool inside_space(const SpaceTimeTestFunction& phi, double x) {
    return !phi.compact || (x >= phi.x_lo && x <= phi.x_hi);
}

void require_support(const Trajectory& traj, const SpaceTimeTestFunction& phi, const char* who) {
    const Grid1D& g = traj.snapshots.front().grid;
    const double t0 = traj.snapshots.front().t;
    const double t1 = traj.snapshots.back().t;
    if (!phi.compact) throw InputError(std::string(who) + ": test function '" + phi.id +
                                       "' is not compactly supported");
    const bool ok = phi.x_lo > g.x_min && phi.x_hi < g.x_max && phi.t_lo >= t0 &&
                    phi.t_hi <= t1 + 1e-12 * std::max(1.0, t1);
    if (!ok) {
        std::ostringstream os;
        os << who << ": support of '" << phi.id << "' [" << phi.t_lo << "," << phi.t_hi
           << "]x[" << phi.x_lo << "," << phi.x_hi << "] leaves the window [" << t0 << ","
           << t1 << "]x(" << g.x_min << "," << g.x_max << ")";
        throw InputError(os.str());
    }
}

}  // namespace

KineticMeasureHistogram kinetic_measures(const Trajectory& traj, int bins) {
    require_nonempty(traj, "kinetic_measures");
    if (bins < 1) throw InputError("kinetic_measures: bins must be positive");
    const Grid1D& g = traj.snapshots.front().grid;
    const double dx = g.dx();
    const double eps = traj.config.epsilon;

    KineticMeasureHistogram h;
    h.t_lo = traj.snapshots.front().t;
    h.t_hi = traj.snapshots.back().t;
    h.x_lo = g.x_min;
    h.x_hi = g.x_max;
    h.s_min = std::numeric_limits<double>::infinity();
    h.s_max = -h.s_min;
    for (const FluidState& st : traj.snapshots) {
        for (std::size_t i = 0; i < st.sigma.size(); ++i) {
            h.s_min = std::min(h.s_min, st.beta[i] - st.sigma[i]);
            h.s_max = std::max(h.s_max, st.beta[i] + st.sigma[i]);
        }
    }
    double lo = h.s_min, hi = h.s_max;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    h.s_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int j = 0; j <= bins; ++j) h.s_edges[j] = lo + (hi - lo) * j / bins;
    h.s_edges.back() = hi;
    h.mu1.assign(static_cast<std::size_t>(bins), 0.0);
    h.mu2.assign(static_cast<std::size_t>(bins), 0.0);
    h.support_lo = std::numeric_limits<double>::infinity();
    h.support_hi = -h.support_lo;

    auto bin_of = [&](double s) {
        const int j = static_cast<int>(std::floor((s - lo) / (hi - lo) * bins));
        return static_cast<std::size_t>(std::clamp(j, 0, bins - 1));
    };
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const double wk = traj.weights[k];
        if (wk == 0.0) continue;
        const FluidState& st = traj.snapshots[k];
        const Padded p = pad(traj, st);
        for (std::size_t i = 0; i < st.sigma.size(); ++i) {
            const double sx = (p.s[i + 2] - p.s[i]) / (2.0 * dx);
            const double bx = (p.b[i + 2] - p.b[i]) / (2.0 * dx);
            const double m_minus = eps * (sx - bx) * (sx - bx) * dx * wk;  // at s = beta - sigma
            const double m_plus = eps * (sx + bx) * (sx + bx) * dx * wk;   // at s = beta + sigma
            const double s_minus = st.beta[i] - st.sigma[i];
            const double s_plus = st.beta[i] + st.sigma[i];
            const std::size_t jm = bin_of(s_minus);
            const std::size_t jp = bin_of(s_plus);
            h.mu1[jm] += m_minus;
            h.mu2[jm] += m_minus;
            h.mu1[jp] += m_plus;
            h.mu2[jp] -= m_plus;
            if (m_minus > 0.0) {
                h.support_lo = std::min(h.support_lo, s_minus);
                h.support_hi = std::max(h.support_hi, s_minus);
            }
            if (m_plus > 0.0) {
                h.support_lo = std::min(h.support_lo, s_plus);
                h.support_hi = std::max(h.support_hi, s_plus);
            }
        }
    }
    if (!(h.support_hi >= h.support_lo)) h.support_lo = h.support_hi = 0.5 * (lo + hi);
    return h;
}

DissipationField entropy_dissipation_field(const Trajectory& traj, const EntropyPairEval& pair) {
    require_nonempty(traj, "entropy_dissipation_field");
    const std::size_t K = traj.snapshots.size();
    if (K < 3) throw InputError("entropy_dissipation_field: need at least three snapshots");
    const Grid1D& g = traj.snapshots.front().grid;
    const int n = g.n_cells;
    const double dx = g.dx();
    const double eps = traj.config.epsilon;

    std::vector<std::vector<double>> eta(K);
    for (std::size_t k = 0; k < K; ++k) {
        eta[k].resize(static_cast<std::size_t>(n));
        const FluidState& st = traj.snapshots[k];
        for (int i = 0; i < n; ++i) eta[k][i] = pair.eta(st.sigma[i], st.beta[i]);
    }

    DissipationField f;
    f.n_times = static_cast<int>(K) - 2;
    f.n_cells = n;
    const std::size_t total = static_cast<std::size_t>(f.n_times) * static_cast<std::size_t>(n);
    f.lhs.resize(total);
    f.rhs.resize(total);
    f.dissipation.resize(total);
    for (std::size_t k = 1; k + 1 < K; ++k) {
        const FluidState& st = traj.snapshots[k];
        f.t.push_back(st.t);
        const Padded p = pad(traj, st);
        std::vector<double> ep(static_cast<std::size_t>(n) + 2), qp(ep.size());
        for (std::size_t j = 0; j < ep.size(); ++j) {
            ep[j] = pair.eta(p.s[j], p.b[j]);
            qp[j] = pair.q(p.s[j], p.b[j]);
        }
        const double dt2 = traj.snapshots[k + 1].t - traj.snapshots[k - 1].t;
        const double wk = 0.5 * dt2;
        for (int i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(i) + 1;
            const double sx = (p.s[c + 1] - p.s[c - 1]) / (2.0 * dx);
            const double bx = (p.b[c + 1] - p.b[c - 1]) / (2.0 * dx);
            const Mat2 H = pair.hessian_eta(p.s[c], p.b[c]);
            const Vec2 ux{sx, bx};
            const double quad = ux[0] * (H(0, 0) * ux[0] + H(0, 1) * ux[1]) +
                                ux[1] * (H(1, 0) * ux[0] + H(1, 1) * ux[1]);
            const double l = (eta[k + 1][i] - eta[k - 1][i]) / dt2 + (qp[c + 1] - qp[c - 1]) / (2.0 * dx);
            const double d = -eps * quad;
            const double r = eps * (ep[c + 1] - 2.0 * ep[c] + ep[c - 1]) / (dx * dx) + d;
            const std::size_t idx = (k - 1) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
            f.lhs[idx] = l;
            f.rhs[idx] = r;
            f.dissipation[idx] = d;
            f.l1_difference += std::fabs(l - r) * dx * wk;
            f.l1_lhs += std::fabs(l) * dx * wk;
        }
    }
    return f;
}

Vec2 weak_residual(const Trajectory& traj, const SpaceTimeTestFunction& phi) {
    require_nonempty(traj, "weak_residual");
    require_support(traj, phi, "weak_residual");
    const Grid1D& g = traj.snapshots.front().grid;
    const double dx = g.dx();
    const std::vector<double> wt = time_weights(traj);
    Vec2 acc{0.0, 0.0};
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const FluidState& st = traj.snapshots[k];
        if (!inside_time(phi, st.t) || wt[k] == 0.0) continue;
        for (int i = 0; i < g.n_cells; ++i) {
            const double x = g.x(i);
            if (!inside_space(phi, x)) continue;
            const double pt = phi.phi_t(st.t, x);
            const double px = phi.phi_x(st.t, x);
            if (pt == 0.0 && px == 0.0) continue;
            const FluxValue F = flux_F(st.sigma[i], st.beta[i]);
            acc[0] += (st.sigma[i] * pt + F.f1 * px) * dx * wt[k];
            acc[1] += (st.beta[i] * pt + F.f2 * px) * dx * wt[k];
        }
    }
    const FluidState& u0 = traj.snapshots.front();
    if (inside_time(phi, u0.t)) {
        for (int i = 0; i < g.n_cells; ++i) {
            const double v = phi.phi(u0.t, g.x(i));
            acc[0] += u0.sigma[i] * v * dx;
            acc[1] += u0.beta[i] * v * dx;
        }
    }
    return acc;
}

double entropy_integral(const Trajectory& traj, const EntropyPairEval& pair,
                        const SpaceTimeTestFunction& phi) {
    require_nonempty(traj, "entropy_integral");
    const Grid1D& g = traj.snapshots.front().grid;
    const double dx = g.dx();
    const std::vector<double> wt = time_weights(traj);
    double acc = 0.0;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const FluidState& st = traj.snapshots[k];
        if (!inside_time(phi, st.t) || wt[k] == 0.0) continue;
        for (int i = 0; i < g.n_cells; ++i) {
            const double x = g.x(i);
            if (!inside_space(phi, x)) continue;
            const double pt = phi.phi_t(st.t, x);
            const double px = phi.phi_x(st.t, x);
            if (pt == 0.0 && px == 0.0) continue;
            acc += (pair.eta(st.sigma[i], st.beta[i]) * pt + pair.q(st.sigma[i], st.beta[i]) * px) *
                   dx * wt[k];
        }
    }
    return acc;
}

namespace {

struct Range {
    double s_lo, s_hi, b_lo, b_hi;
};

Range state_range(const Trajectory& traj) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const FluidState& st : traj.snapshots) {
        for (std::size_t i = 0; i < st.sigma.size(); ++i) {
            r.s_lo = std::min(r.s_lo, st.sigma[i]);
            r.s_hi = std::max(r.s_hi, st.sigma[i]);
            r.b_lo = std::min(r.b_lo, st.beta[i]);
            r.b_hi = std::max(r.b_hi, st.beta[i]);
        }
    }
    return r;
}

void require_nonnegative(const Trajectory& traj, const SpaceTimeTestFunction& phi) {
    if (!phi.nonnegative)
        throw InputError("entropy_inequality_check: test function '" + phi.id +
                         "' is not declared nonnegative");
    const Grid1D& g = traj.snapshots.front().grid;
    for (const FluidState& st : traj.snapshots) {
        if (!inside_time(phi, st.t)) continue;
        for (int i = 0; i < g.n_cells; ++i) {
            const double v = phi.phi(st.t, g.x(i));
            if (v < 0.0) {
                std::ostringstream os;
                os << "entropy_inequality_check: test function '" << phi.id
                   << "' is negative at (t, x) = (" << st.t << ", " << g.x(i) << ")";
                throw InputError(os.str());
            }
        }
    }
}

}  // namespace

ConvexityCertificate certify_on_trajectory(const Trajectory& traj, const EntropyPairEval& pair,
                                           unsigned seed) {
    require_nonempty(traj, "certify_on_trajectory");
    const Range r = state_range(traj);
    return certify_convexity(pair, r.s_lo, r.s_hi, r.b_lo, r.b_hi, 21, 200, seed);
}

double entropy_inequality_check(const Trajectory& traj, const EntropyPairEval& pair,
                                const SpaceTimeTestFunction& phi, unsigned seed) {
    require_nonempty(traj, "entropy_inequality_check");
    require_support(traj, phi, "entropy_inequality_check");
    require_nonnegative(traj, phi);
    const ConvexityCertificate cert = certify_on_trajectory(traj, pair, seed);
    if (!cert.convex) {
        std::ostringstream os;
        os << "entropy_inequality_check: pair '" << pair.provenance
           << "' is not certified convex on the trajectory range (min Hessian eigenvalue "
           << cert.min_eigenvalue << " at sigma=" << cert.at_sigma << ", beta=" << cert.at_beta
           << ")";
        throw InputError(os.str());
    }
    return entropy_integral(traj, pair, phi);
}

EntropyAudit audit_entropy_inequality(const Trajectory& traj, const EntropyPairEval& pair,
                                      const SpaceTimeTestFunction& phi, unsigned seed) {
    EntropyAudit a;
    a.pair = pair.provenance;
    a.phi = phi.id;
    a.value = entropy_inequality_check(traj, pair, phi, seed);

    const Grid1D& g = traj.snapshots.front().grid;
    const double dx = g.dx();
    const std::vector<double> wt = time_weights(traj);
    double sup_eta = 0.0;
    double phi_xx_l1 = 0.0;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const FluidState& st = traj.snapshots[k];
        for (int i = 0; i < g.n_cells; ++i) {
            sup_eta = std::max(sup_eta, std::fabs(pair.eta(st.sigma[i], st.beta[i])));
            if (inside_time(phi, st.t) && inside_space(phi, g.x(i)))
                phi_xx_l1 += std::fabs(phi.phi_xx(st.t, g.x(i))) * dx * wt[k];
        }
    }
    a.c_pair = sup_eta * phi_xx_l1;
    a.threshold = a.c_pair * (std::sqrt(traj.config.epsilon) + dx * dx);
    a.pass = a.value >= -a.threshold;
    return a;
}

Window Window::interior(const Grid1D& grid) {
    return {grid.x_min + 0.1 * grid.length(), grid.x_max - 0.1 * grid.length()};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("loglog_slope: need >= 2 paired values");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0 && y[k] > 0.0)) throw InputError("loglog_slope: data must be positive");
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

FluidState restrict_to_coarse(const FluidState& fine) {
    if (fine.grid.n_cells % 2 != 0 || fine.grid.n_cells < 8)
        throw InputError("restrict_to_coarse: need an even number of cells >= 8");
    const Grid1D cg = Grid1D::make(fine.grid.x_min, fine.grid.x_max, fine.grid.n_cells / 2);
    FluidState c = FluidState::zeros(cg, fine.t);
    for (int i = 0; i < cg.n_cells; ++i) {
        c.sigma[i] = 0.5 * (fine.sigma[2 * i] + fine.sigma[2 * i + 1]);
        c.beta[i] = 0.5 * (fine.beta[2 * i] + fine.beta[2 * i + 1]);
    }
    return c;
}

namespace {

double l1_window(const FluidState& a, const FluidState& b, const Window& w) {
    const Grid1D& g = a.grid;
    double acc = 0.0;
    for (int i = 0; i < g.n_cells; ++i) {
        const double x = g.x(i);
        if (x < w.x_lo || x > w.x_hi) continue;
        acc += (std::fabs(a.sigma[i] - b.sigma[i]) + std::fabs(a.beta[i] - b.beta[i])) * g.dx();
    }
    return acc;
}

}  // namespace

ConvergenceReport convergence_metrics(const std::vector<const Trajectory*>& trajs, SweepKind kind,
                                      std::optional<Window> window) {
    if (trajs.size() < 2) throw InputError("convergence_metrics: need at least two runs");
    for (const Trajectory* t : trajs) {
        if (t == nullptr) throw InputError("convergence_metrics: null trajectory");
        require_nonempty(*t, "convergence_metrics");
    }
    const Grid1D& g0 = trajs.front()->final_state().grid;
    const double t_final = trajs.front()->final_state().t;
    ConvergenceReport rep;
    rep.kind = kind;
    rep.window = window.value_or(Window::interior(g0));
    if (!(rep.window.x_lo >= g0.x_min && rep.window.x_hi <= g0.x_max && rep.window.x_lo < rep.window.x_hi))
        throw InputError("convergence_metrics: window outside the domain");

    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const FluidState& s = trajs[k]->final_state();
        if (s.grid.x_min != g0.x_min || s.grid.x_max != g0.x_max)
            throw InputError("convergence_metrics: runs cover different domains");
        if (std::fabs(s.t - t_final) > 1e-12 * std::max(1.0, t_final))
            throw InputError("convergence_metrics: runs end at different times");
        if (kind == SweepKind::epsilon) {
            if (s.grid.n_cells != g0.n_cells)
                throw InputError("convergence_metrics: epsilon sweep needs identical grids");
            rep.parameters.push_back(trajs[k]->config.epsilon);
        } else {
            if (s.grid.n_cells != g0.n_cells << k)
                throw InputError("convergence_metrics: dx sweep needs n_cells to double per run");
            rep.parameters.push_back(s.grid.dx());
        }
    }

    for (std::size_t k = 0; k + 1 < trajs.size(); ++k) {
        const FluidState& a = trajs[k]->final_state();
        const FluidState& b = trajs[k + 1]->final_state();
        rep.l1_differences.push_back(
            kind == SweepKind::epsilon ? l1_window(a, b, rep.window)
                                       : l1_window(a, restrict_to_coarse(b), rep.window));
    }
    rep.monotone_decreasing = true;
    for (std::size_t k = 0; k + 1 < rep.l1_differences.size(); ++k) {
        const double d0 = rep.l1_differences[k], d1 = rep.l1_differences[k + 1];
        if (!(d1 < d0)) rep.monotone_decreasing = false;
        rep.rates.push_back(std::log(d0 / d1) / std::log(rep.parameters[k] / rep.parameters[k + 1]));
    }
    if (rep.l1_differences.size() < 2) rep.monotone_decreasing = false;
    rep.observed_order = (kind == SweepKind::dx && rep.l1_differences.size() >= 2)
                             ? std::log2(rep.l1_differences[0] / rep.l1_differences[1])
                             : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

}  // namespace carroll
