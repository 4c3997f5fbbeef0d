#include "carroll/flux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carroll/errors.hpp"

namespace carroll {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

Mat2 Mat2::operator*(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
    return r;
}

Vec2 Mat2::operator*(const Vec2& v) const {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

Mat2 Mat2::operator-(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
}

double Mat2::operator_norm() const {
    // sqrt of the largest eigenvalue of A^T A
    const double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
    const double p = a * a + c * c;
    const double q = a * b + c * d;
    const double r = b * b + d * d;
    const double mean = 0.5 * (p + r);
    const double rad = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
    return std::sqrt(mean + rad);
}

double Mat2::max_abs() const {
    return std::max({std::abs(m[0][0]), std::abs(m[0][1]), std::abs(m[1][0]), std::abs(m[1][1])});
}

Vec2 row_times(const Vec2& v, const Mat2& a) {
    return {v[0] * a(0, 0) + v[1] * a(1, 0), v[0] * a(0, 1) + v[1] * a(1, 1)};
}

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

Vec2 eigenvector1() { return {kInvSqrt2, -kInvSqrt2}; }
Vec2 eigenvector2() { return {kInvSqrt2, kInvSqrt2}; }

void require_admissible_point(double sigma, double beta, const char* who) {
    if (!(sigma > std::abs(beta)) || !std::isfinite(sigma) || !std::isfinite(beta)) {
        std::ostringstream os;
        os << who << ": (sigma, beta) = (" << sigma << ", " << beta
           << ") is outside sigma > |beta|; the flux degenerates on the lines beta = +-sigma";
        throw DomainError(os.str());
    }
}

FluxValue flux_F(double sigma, double beta) {
    require_admissible_point(sigma, beta, "flux_F");
    return flux_unchecked(sigma, beta);
}

Mat2 jacobian_F(double sigma, double beta) {
    require_admissible_point(sigma, beta, "jacobian_F");
    const double inv = 1.0 / ((beta - sigma) * (beta + sigma));
    return Mat2{{{{beta * inv, -sigma * inv}, {-sigma * inv, beta * inv}}}};
}

Mat2 carroll_matrix(double sigma, double beta) {
    return Mat2{{{{beta, sigma}, {sigma, beta}}}};
}

EigenData eigen(double sigma, double beta) {
    require_admissible_point(sigma, beta, "eigen");
    EigenData e;
    const double dm = beta - sigma;
    const double dp = beta + sigma;
    e.lambda1 = 1.0 / dm;
    e.lambda2 = 1.0 / dp;
    e.r1 = eigenvector1();
    e.r2 = eigenvector2();
    e.gnl1 = std::sqrt(2.0) / (dm * dm);
    e.gnl2 = -std::sqrt(2.0) / (dp * dp);
    return e;
}

namespace {
void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParameterError(std::string(what) + " must be positive");
    }
}
}  // namespace

double psi_delta(double s, double delta) {
    require_positive(delta, "psi_delta: delta");
    return psi_unchecked(s, delta);
}

double psi_delta_prime(double s, double delta) {
    require_positive(delta, "psi_delta_prime: delta");
    if (s <= 0.0) return 0.0;
    if (s <= delta) return s / delta;
    return 1.0;
}

double h_primitive(double s, double c0) {
    require_positive(c0, "h_primitive: c0");
    return h_unchecked(s, c0);
}

CutoffProfile::CutoffProfile(double delta) : delta_(delta) {
    require_positive(delta, "CutoffProfile: delta");
}

double CutoffProfile::psi(double s) const { return psi_unchecked(s, delta_); }
double CutoffProfile::psi_prime(double s) const { return psi_delta_prime(s, delta_); }
double CutoffProfile::h(double s) const { return h_unchecked(s, delta_); }

Mat2 modified_M(double sigma, double beta, double c0) {
    require_positive(c0, "modified_M: c0");
    const double phi1 = -1.0 / psi_unchecked(sigma - beta, c0);
    const double phi2 = 1.0 / psi_unchecked(sigma + beta, c0);
    // -1/2 [[-1,1],[1,1]] diag(phi1,phi2) [[1,-1],[-1,-1]] multiplied out
    const double diag = 0.5 * (phi1 + phi2);
    const double off = 0.5 * (phi2 - phi1);
    return Mat2{{{{diag, off}, {off, diag}}}};
}

}  // namespace carroll
