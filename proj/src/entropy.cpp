#include "carroll/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "carroll/errors.hpp"

namespace carroll {

TestFunctionPair TestFunctionPair::from_f(ScalarFn f, ScalarFn fp, ScalarFn fpp,
                                          std::string label) {
    TestFunctionPair tp;
    tp.f = std::move(f);
    tp.fp = std::move(fp);
    tp.fpp = std::move(fpp);
    tp.label = std::move(label);
    return tp;
}

TestFunctionPair TestFunctionPair::from_g(ScalarFn g, ScalarFn gp, std::string label) {
    TestFunctionPair tp;
    tp.g = std::move(g);
    tp.gp = std::move(gp);
    tp.label = std::move(label);
    return tp;
}

TestPairReport validate_test_pair(const TestFunctionPair& tp, double radius) {
    constexpr double kTol = 1e-12;
    constexpr int kSamples = 2001;
    TestPairReport r;
    r.scan_radius = radius;
    if (tp.has_f()) {
        if (!tp.fp || !tp.fpp) {
            throw AdmissibilityError("test pair '" + tp.label + "': f needs f' and f''");
        }
        r.f_prime_at_zero = tp.fp(0.0);
        if (!(std::abs(r.f_prime_at_zero) <= kTol)) {
            std::ostringstream os;
            os << "test pair '" << tp.label << "': f'(0) = " << r.f_prime_at_zero
               << " != 0, f is not in A";
            throw AdmissibilityError(os.str());
        }
    }
    if (tp.has_g()) {
        if (!tp.gp) throw AdmissibilityError("test pair '" + tp.label + "': g needs g'");
        r.g_at_zero = tp.g(0.0);
        if (!(std::abs(r.g_at_zero) <= kTol)) {
            std::ostringstream os;
            os << "test pair '" << tp.label << "': g(0) = " << r.g_at_zero
               << " != 0, g is not in B";
            throw AdmissibilityError(os.str());
        }
    }
    for (int k = 0; k < kSamples; ++k) {
        const double s = -radius + 2.0 * radius * k / (kSamples - 1);
        if (tp.has_f()) r.max_abs_fpp = std::max(r.max_abs_fpp, std::abs(tp.fpp(s)));
        if (tp.has_g()) r.max_abs_gp = std::max(r.max_abs_gp, std::abs(tp.gp(s)));
    }
    if (!std::isfinite(r.max_abs_fpp) || !std::isfinite(r.max_abs_gp)) {
        throw AdmissibilityError("test pair '" + tp.label +
                                 "': f'' or g' unbounded on the scan interval");
    }
    return r;
}

namespace {

// Fourth-order central difference of a phase-space function along one axis.
double d4(const PhaseFn& fn, double sigma, double beta, int axis, double h) {
    auto at = [&](double k) {
        return axis == 0 ? fn(sigma + k * h, beta) : fn(sigma, beta + k * h);
    };
    return (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h);
}

double scaled_step(double step, double sigma, double beta) {
    return step * std::max(1.0, std::max(std::abs(sigma), std::abs(beta)));
}

}  // namespace

Vec2 EntropyPairEval::gradient_eta(double sigma, double beta) const {
    if (grad_eta) return grad_eta(sigma, beta);
    const double h = scaled_step(1e-3, sigma, beta);
    return {d4(eta, sigma, beta, 0, h), d4(eta, sigma, beta, 1, h)};
}

Vec2 EntropyPairEval::gradient_q(double sigma, double beta) const {
    if (grad_q) return grad_q(sigma, beta);
    const double h = scaled_step(1e-3, sigma, beta);
    return {d4(q, sigma, beta, 0, h), d4(q, sigma, beta, 1, h)};
}

Mat2 EntropyPairEval::hessian_eta(double sigma, double beta) const {
    if (hess_eta) return hess_eta(sigma, beta);
    const double h = scaled_step(1e-3, sigma, beta);
    Mat2 out;
    const double e0 = eta(sigma, beta);
    out(0, 0) = (eta(sigma + h, beta) - 2.0 * e0 + eta(sigma - h, beta)) / (h * h);
    out(1, 1) = (eta(sigma, beta + h) - 2.0 * e0 + eta(sigma, beta - h)) / (h * h);
    const double mixed = (eta(sigma + h, beta + h) - eta(sigma + h, beta - h) -
                          eta(sigma - h, beta + h) + eta(sigma - h, beta - h)) /
                         (4.0 * h * h);
    out(0, 1) = out(1, 0) = mixed;
    return out;
}

EntropyPairEval make_entropy_pair_1(const TestFunctionPair& tp, Validation v,
                                    const QuadratureOptions& quad) {
    if (!tp.has_f()) {
        EntropyPairEval zero = scaled(special_pair_closed_form(), 0.0);
        zero.provenance = "eta1[f=0]";
        return zero;
    }
    if (v == Validation::enforce) validate_test_pair(tp);
    auto f = tp.f;
    auto fp = tp.fp;
    auto fpp = tp.fpp;
    const double patch = fpp(0.0);
    // f'(s)/s, continuous after the s = 0 patch
    auto kernel = [fp, patch](double s) { return s == 0.0 ? patch : fp(s) / s; };
    auto K = [kernel, quad](double x) { return adaptive_simpson(kernel, 0.0, x, quad); };

    EntropyPairEval p;
    p.provenance = "eta1[" + tp.label + "]";
    p.eta = [f](double sigma, double beta) { return f(beta - sigma) + f(beta + sigma); };
    p.q = [K](double sigma, double beta) { return K(beta + sigma) + K(beta - sigma); };
    p.grad_eta = [fp](double sigma, double beta) -> Vec2 {
        const double a = fp(beta - sigma), b = fp(beta + sigma);
        return {b - a, a + b};
    };
    p.grad_q = [fp](double sigma, double beta) -> Vec2 {
        const double dm = beta - sigma, dp = beta + sigma;
        const double a = fp(dm) / dm, b = fp(dp) / dp;
        return {b - a, a + b};
    };
    p.hess_eta = [fpp](double sigma, double beta) -> Mat2 {
        const double a = fpp(beta - sigma), b = fpp(beta + sigma);
        return Mat2{{{{a + b, b - a}, {b - a, a + b}}}};
    };
    return p;
}

EntropyPairEval make_entropy_pair_2(const TestFunctionPair& tp, Validation v,
                                    const QuadratureOptions& quad) {
    if (!tp.has_g()) {
        EntropyPairEval zero = scaled(special_pair_closed_form(), 0.0);
        zero.provenance = "eta2[g=0]";
        return zero;
    }
    if (v == Validation::enforce) validate_test_pair(tp);
    auto g = tp.g;
    auto gp = tp.gp;
    const double patch = gp(0.0);
    auto over_s = [g, patch](double s) { return s == 0.0 ? patch : g(s) / s; };

    EntropyPairEval p;
    p.provenance = "eta2[" + tp.label + "]";
    p.eta = [g, quad](double sigma, double beta) {
        return adaptive_simpson(g, beta - sigma, beta + sigma, quad);
    };
    p.q = [over_s, quad](double sigma, double beta) {
        const double lo = beta - sigma, hi = beta + sigma;
        if (lo < 0.0 && hi > 0.0) {
            // split at the patched point so it is a panel endpoint
            return adaptive_simpson(over_s, lo, 0.0, quad) + adaptive_simpson(over_s, 0.0, hi, quad);
        }
        return adaptive_simpson(over_s, lo, hi, quad);
    };
    p.grad_eta = [g](double sigma, double beta) -> Vec2 {
        const double a = g(beta - sigma), b = g(beta + sigma);
        return {a + b, b - a};
    };
    p.grad_q = [g](double sigma, double beta) -> Vec2 {
        const double dm = beta - sigma, dp = beta + sigma;
        const double a = g(dm) / dm, b = g(dp) / dp;
        return {a + b, b - a};
    };
    p.hess_eta = [gp](double sigma, double beta) -> Mat2 {
        const double a = gp(beta - sigma), b = gp(beta + sigma);
        return Mat2{{{{b - a, a + b}, {a + b, b - a}}}};
    };
    return p;
}

EntropyPairEval sum(const EntropyPairEval& a, const EntropyPairEval& b) {
    EntropyPairEval p;
    p.provenance = a.provenance + "+" + b.provenance;
    p.eta = [a, b](double s, double be) { return a.eta(s, be) + b.eta(s, be); };
    p.q = [a, b](double s, double be) { return a.q(s, be) + b.q(s, be); };
    p.grad_eta = [a, b](double s, double be) -> Vec2 {
        const Vec2 x = a.gradient_eta(s, be), y = b.gradient_eta(s, be);
        return {x[0] + y[0], x[1] + y[1]};
    };
    p.grad_q = [a, b](double s, double be) -> Vec2 {
        const Vec2 x = a.gradient_q(s, be), y = b.gradient_q(s, be);
        return {x[0] + y[0], x[1] + y[1]};
    };
    p.hess_eta = [a, b](double s, double be) -> Mat2 {
        const Mat2 x = a.hessian_eta(s, be), y = b.hessian_eta(s, be);
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r(i, j) = x(i, j) + y(i, j);
        return r;
    };
    return p;
}

EntropyPairEval scaled(const EntropyPairEval& p, double c) {
    EntropyPairEval r;
    r.provenance = std::to_string(c) + "*" + p.provenance;
    r.eta = [p, c](double s, double b) { return c * p.eta(s, b); };
    r.q = [p, c](double s, double b) { return c * p.q(s, b); };
    r.grad_eta = [p, c](double s, double b) -> Vec2 {
        const Vec2 g = p.gradient_eta(s, b);
        return {c * g[0], c * g[1]};
    };
    r.grad_q = [p, c](double s, double b) -> Vec2 {
        const Vec2 g = p.gradient_q(s, b);
        return {c * g[0], c * g[1]};
    };
    r.hess_eta = [p, c](double s, double b) -> Mat2 {
        Mat2 h = p.hessian_eta(s, b);
        for (auto& row : h.m)
            for (auto& x : row) x *= c;
        return h;
    };
    return r;
}

EntropyPairEval make_entropy_pair(const TestFunctionPair& tp, const QuadratureOptions& quad) {
    validate_test_pair(tp);
    if (tp.has_f() && tp.has_g()) {
        return sum(make_entropy_pair_1(tp, Validation::skip, quad),
                   make_entropy_pair_2(tp, Validation::skip, quad));
    }
    if (tp.has_g()) return make_entropy_pair_2(tp, Validation::skip, quad);
    return make_entropy_pair_1(tp, Validation::skip, quad);
}

EntropyPairEval special_pair_closed_form() {
    EntropyPairEval p;
    p.provenance = "special-closed-form";
    p.eta = [](double s, double b) { return 0.5 * (s * s + b * b); };
    p.q = [](double, double b) { return b; };
    p.grad_eta = [](double s, double b) -> Vec2 { return {s, b}; };
    p.grad_q = [](double, double) -> Vec2 { return {0.0, 1.0}; };
    p.hess_eta = [](double, double) { return Mat2::identity(); };
    return p;
}

double entropy_equation_residual(const EntropyPairEval& pair, double sigma, double beta,
                                 double step) {
    // Power-of-two spacing keeps sigma +- h and beta +- h exact for moderate
    // states, so the four samples of a wave solution cancel pairwise.
    const double h = std::ldexp(1.0, static_cast<int>(std::lround(std::log2(step))));
    // eta_ss - eta_bb; the centre value cancels
    const double wave = (pair.eta(sigma + h, beta) + pair.eta(sigma - h, beta) -
                         pair.eta(sigma, beta + h) - pair.eta(sigma, beta - h)) /
                        (h * h);
    const double d = beta * beta - sigma * sigma;
    return sigma * d * d * wave;
}

Vec2 entropy_compatibility_residual(const EntropyPairEval& pair, double sigma, double beta,
                                    double step) {
    const double h = scaled_step(step, sigma, beta);
    const Vec2 gq{d4(pair.q, sigma, beta, 0, h), d4(pair.q, sigma, beta, 1, h)};
    const Vec2 ge{d4(pair.eta, sigma, beta, 0, h), d4(pair.eta, sigma, beta, 1, h)};
    const Vec2 rhs = row_times(ge, jacobian_F(sigma, beta));
    return {gq[0] - rhs[0], gq[1] - rhs[1]};
}

namespace {
double min_eigenvalue(const Mat2& h) {
    const double a = h(0, 0), d = h(1, 1), b = 0.5 * (h(0, 1) + h(1, 0));
    const double mean = 0.5 * (a + d);
    return mean - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}
}  // namespace

ConvexityCertificate certify_convexity(const EntropyPairEval& pair, double sigma_lo,
                                       double sigma_hi, double beta_lo, double beta_hi, int n,
                                       int random_points, unsigned seed) {
    constexpr double kTol = 1e-10;
    ConvexityCertificate c;
    c.min_eigenvalue = std::numeric_limits<double>::infinity();
    auto probe = [&](double s, double b) {
        if (!(s > std::abs(b))) return;
        const double ev = min_eigenvalue(pair.hessian_eta(s, b));
        ++c.points_checked;
        if (ev < c.min_eigenvalue) {
            c.min_eigenvalue = ev;
            c.at_sigma = s;
            c.at_beta = b;
        }
    };
    const int m = std::max(n, 2);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            probe(sigma_lo + (sigma_hi - sigma_lo) * i / (m - 1),
                  beta_lo + (beta_hi - beta_lo) * j / (m - 1));
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> us(sigma_lo, sigma_hi), ub(beta_lo, beta_hi);
    for (int k = 0; k < random_points; ++k) {
        const double s = us(rng);
        probe(s, ub(rng));
    }
    c.convex = c.points_checked > 0 && c.min_eigenvalue >= -kTol;
    return c;
}

std::vector<std::string> catalog_names() {
    return {"special", "quartic", "linear-g", "quadratic-g", "cubic-g", "concave-control"};
}

bool in_catalog(const std::string& name) {
    const auto names = catalog_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

TestFunctionPair catalog_test_pair(const std::string& name) {
    if (name == "special") {
        return TestFunctionPair::from_f([](double s) { return 0.25 * s * s; },
                                        [](double s) { return 0.5 * s; },
                                        [](double) { return 0.5; }, name);
    }
    if (name == "concave-control") {
        return TestFunctionPair::from_f([](double s) { return -0.25 * s * s; },
                                        [](double s) { return -0.5 * s; },
                                        [](double) { return -0.5; }, name);
    }
    if (name == "quartic") {
        return TestFunctionPair::from_f([](double s) { return s * s * s * s; },
                                        [](double s) { return 4.0 * s * s * s; },
                                        [](double s) { return 12.0 * s * s; }, name);
    }
    if (name == "linear-g") {
        return TestFunctionPair::from_g([](double s) { return s; }, [](double) { return 1.0; },
                                        name);
    }
    if (name == "quadratic-g") {
        return TestFunctionPair::from_g([](double s) { return s * s; },
                                        [](double s) { return 2.0 * s; }, name);
    }
    if (name == "cubic-g") {
        return TestFunctionPair::from_g([](double s) { return s * s * s; },
                                        [](double s) { return 3.0 * s * s; }, name);
    }
    throw ConfigError("unknown entropy pair '" + name + "'");
}

EntropyPairEval catalog_pair(const std::string& name) {
    EntropyPairEval p = make_entropy_pair(catalog_test_pair(name));
    p.provenance = name;
    return p;
}

}  // namespace carroll
