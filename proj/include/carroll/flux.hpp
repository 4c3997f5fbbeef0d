/// @file flux.hpp
/// @brief Conservative flux for gamma = 3, its Jacobian and eigenstructure,
/// the C^1 cutoff psi_delta with its primitive h, and the globally defined
/// modified matrix M(u).
///
/// In the admissible region sigma > |beta| the flux is
///   F(u) = ( artanh(beta/sigma), 0.5 ln(sigma^2 - beta^2) )
/// and grad F = [[beta, -sigma], [-sigma, beta]] / (beta^2 - sigma^2), which is
/// the inverse of [[beta, sigma], [sigma, beta]].
#pragma once

#include <array>
#include <cmath>

namespace carroll {

using Vec2 = std::array<double, 2>;

struct Mat2 {
    std::array<std::array<double, 2>, 2> m{};

    double operator()(int i, int j) const { return m[i][j]; }
    double& operator()(int i, int j) { return m[i][j]; }

    static Mat2 identity() { return Mat2{{{{1.0, 0.0}, {0.0, 1.0}}}}; }
    Mat2 operator*(const Mat2& o) const;
    Vec2 operator*(const Vec2& v) const;
    Mat2 operator-(const Mat2& o) const;
    /// Largest singular value.
    double operator_norm() const;
    double max_abs() const;
};

/// Row-vector times matrix: (v^T A)^T.
Vec2 row_times(const Vec2& v, const Mat2& a);
double norm2(const Vec2& v);

struct FluxValue {
    double f1 = 0.0;
    double f2 = 0.0;
};

struct EigenData {
    double lambda1 = 0.0;  ///< 1/(beta - sigma), negative when admissible
    double lambda2 = 0.0;  ///< 1/(beta + sigma), positive when admissible
    Vec2 r1{};
    Vec2 r2{};
    double gnl1 = 0.0;  ///< grad(lambda1) . r1
    double gnl2 = 0.0;  ///< grad(lambda2) . r2
};

/// The unit right eigenvectors (1,-1)/sqrt2 and (1,1)/sqrt2.
Vec2 eigenvector1();
Vec2 eigenvector2();

/// Throws DomainError unless sigma > |beta|.
void require_admissible_point(double sigma, double beta, const char* who);

FluxValue flux_F(double sigma, double beta);
Mat2 jacobian_F(double sigma, double beta);
EigenData eigen(double sigma, double beta);

/// [[beta, sigma], [sigma, beta]]: the matrix whose inverse is grad F.
Mat2 carroll_matrix(double sigma, double beta);

/// Unchecked flux for hot loops; caller guarantees sigma > |beta|.
inline FluxValue flux_unchecked(double sigma, double beta) {
    return {std::atanh(beta / sigma), 0.5 * std::log((sigma - beta) * (sigma + beta))};
}

double psi_delta(double s, double delta);
double psi_delta_prime(double s, double delta);
double h_primitive(double s, double c0);

/// psi_delta / h evaluators bound to one cutoff level.
class CutoffProfile {
public:
    explicit CutoffProfile(double delta);

    double delta() const { return delta_; }
    double psi(double s) const;
    double psi_prime(double s) const;
    double h(double s) const;
    /// Cut-off characteristic speeds phi1 = -1/psi(w2), phi2 = 1/psi(w1).
    double phi1(double sigma, double beta) const { return -1.0 / psi(sigma - beta); }
    double phi2(double sigma, double beta) const { return 1.0 / psi(sigma + beta); }

private:
    double delta_;
};

/// Unchecked psi for hot loops (delta > 0 assumed).
inline double psi_unchecked(double s, double delta) {
    if (s <= 0.0) return 0.5 * delta;
    if (s <= delta) return (s * s + delta * delta) / (2.0 * delta);
    return s;
}

inline double h_unchecked(double s, double c0) {
    if (s <= 0.0) return 2.0 * s / c0;
    if (s <= c0) return 2.0 * std::atan(s / c0);
    return 0.5 * M_PI + std::log(s / c0);
}

/// M(u) = -1/2 [[-1,1],[1,1]] diag(phi1, phi2) [[1,-1],[-1,-1]]; defined on all of
/// phase space and equal to jacobian_F wherever w1, w2 >= c0.
Mat2 modified_M(double sigma, double beta, double c0);

/// The a-priori bound C(c0) = 2 * (2/c0) on the operator norm of modified_M.
inline double modified_M_bound(double c0) { return 2.0 * (2.0 / c0); }

}  // namespace carroll
