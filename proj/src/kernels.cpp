#include "carroll/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "carroll/flux.hpp"

namespace carroll::kernels {

void Workspace::resize(std::size_t padded) {
    f1.resize(padded);
    f2.resize(padded);
    face1.resize(padded - 1);
    face2.resize(padded - 1);
}

namespace {

// Loop bodies are shared between the serial and the OpenMP variant so the
// arithmetic cannot drift apart.

inline void flux_at(const double* s, const double* b, double* f1, double* f2, long i) {
    const FluxValue f = flux_unchecked(s[i], b[i]);
    f1[i] = f.f1;
    f2[i] = f.f2;
}

inline void faces_at(const double* f1, const double* f2, double* g1, double* g2, long i) {
    g1[i] = 0.5 * (f1[i] + f1[i + 1]);
    g2[i] = 0.5 * (f2[i] + f2[i + 1]);
}

inline double laplace(const double* u, long k, double inv_dx2) {
    return (u[k + 1] - 2.0 * u[k] + u[k - 1]) * inv_dx2;
}

inline void conservative_cell(const double* s, const double* b, const double* f1,
                              const double* f2, const double* g1, const double* g2, double dx,
                              double eps, Differencing diff, double* ds, double* db, long i) {
    const long k = i + 1;
    const double inv_dx2 = 1.0 / (dx * dx);
    double a1, a2;
    if (diff == Differencing::flux_form) {
        a1 = (g1[k] - g1[k - 1]) / dx;
        a2 = (g2[k] - g2[k - 1]) / dx;
    } else {
        a1 = (f1[k + 1] - f1[k - 1]) / (2.0 * dx);
        a2 = (f2[k + 1] - f2[k - 1]) / (2.0 * dx);
    }
    ds[i] = -a1 + eps * laplace(s, k, inv_dx2);
    db[i] = -a2 + eps * laplace(b, k, inv_dx2);
}

inline void modified_cell(const double* s, const double* b, double dx, double eps, double c0,
                          double* ds, double* db, long i) {
    const long k = i + 1;
    const double inv_dx2 = 1.0 / (dx * dx);
    const double phi1 = -1.0 / psi_unchecked(s[k] - b[k], c0);
    const double phi2 = 1.0 / psi_unchecked(s[k] + b[k], c0);
    const double diag = 0.5 * (phi1 + phi2);
    const double off = 0.5 * (phi2 - phi1);
    const double sx = (s[k + 1] - s[k - 1]) / (2.0 * dx);
    const double bx = (b[k + 1] - b[k - 1]) / (2.0 * dx);
    ds[i] = -(diag * sx + off * bx) + eps * laplace(s, k, inv_dx2);
    db[i] = -(off * sx + diag * bx) + eps * laplace(b, k, inv_dx2);
}

inline double scalar_flux(double w, double c0, bool cutoff) {
    return cutoff ? h_unchecked(w, c0) : std::log(w);
}

inline double scalar_speed(double w, double c0, bool cutoff) {
    return cutoff ? 1.0 / psi_unchecked(w, c0) : 1.0 / w;
}

inline void scalar_cell(const double* w, const double* f, const double* g, double orient,
                        double dx, double eps, double c0, bool cutoff, ScalarForm form,
                        Differencing diff, double* dw, long i) {
    const long k = i + 1;
    const double inv_dx2 = 1.0 / (dx * dx);
    double adv;
    if (form == ScalarForm::characteristic) {
        adv = scalar_speed(w[k], c0, cutoff) * (w[k + 1] - w[k - 1]) / (2.0 * dx);
    } else if (diff == Differencing::flux_form) {
        adv = (g[k] - g[k - 1]) / dx;
    } else {
        adv = (f[k + 1] - f[k - 1]) / (2.0 * dx);
    }
    dw[i] = -orient * adv + eps * laplace(w, k, inv_dx2);
}

}  // namespace

void rhs_conservative(std::span<const double> sigma_p, std::span<const double> beta_p, double dx,
                      double eps, Differencing diff, std::span<double> dsigma,
                      std::span<double> dbeta, Workspace& ws, Exec exec) {
    const long np = static_cast<long>(sigma_p.size());
    const long n = np - 2;
    ws.resize(static_cast<std::size_t>(np));
    const double* s = sigma_p.data();
    const double* b = beta_p.data();
    double* f1 = ws.f1.data();
    double* f2 = ws.f2.data();
    double* g1 = ws.face1.data();
    double* g2 = ws.face2.data();
    double* ds = dsigma.data();
    double* db = dbeta.data();
    if (exec == Exec::parallel) {
#pragma omp parallel
        {
#pragma omp for schedule(static)
            for (long i = 0; i < np; ++i) flux_at(s, b, f1, f2, i);
#pragma omp for schedule(static)
            for (long i = 0; i < np - 1; ++i) faces_at(f1, f2, g1, g2, i);
#pragma omp for schedule(static)
            for (long i = 0; i < n; ++i) conservative_cell(s, b, f1, f2, g1, g2, dx, eps, diff, ds, db, i);
        }
    } else {
        for (long i = 0; i < np; ++i) flux_at(s, b, f1, f2, i);
        for (long i = 0; i < np - 1; ++i) faces_at(f1, f2, g1, g2, i);
        for (long i = 0; i < n; ++i) conservative_cell(s, b, f1, f2, g1, g2, dx, eps, diff, ds, db, i);
    }
}

void rhs_modified(std::span<const double> sigma_p, std::span<const double> beta_p, double dx,
                  double eps, double c0, std::span<double> dsigma, std::span<double> dbeta,
                  Exec exec) {
    const long n = static_cast<long>(sigma_p.size()) - 2;
    const double* s = sigma_p.data();
    const double* b = beta_p.data();
    double* ds = dsigma.data();
    double* db = dbeta.data();
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) modified_cell(s, b, dx, eps, c0, ds, db, i);
    } else {
        for (long i = 0; i < n; ++i) modified_cell(s, b, dx, eps, c0, ds, db, i);
    }
}

void rhs_scalar(std::span<const double> w_p, double orient, double dx, double eps, double c0,
                bool use_cutoff, ScalarForm form, Differencing diff, std::span<double> dw,
                Workspace& ws, Exec exec) {
    const long np = static_cast<long>(w_p.size());
    const long n = np - 2;
    ws.resize(static_cast<std::size_t>(np));
    const double* w = w_p.data();
    double* f = ws.f1.data();
    double* g = ws.face1.data();
    double* out = dw.data();
    const bool need_flux = form == ScalarForm::conservative;
    if (exec == Exec::parallel) {
#pragma omp parallel
        {
            if (need_flux) {
#pragma omp for schedule(static)
                for (long i = 0; i < np; ++i) f[i] = scalar_flux(w[i], c0, use_cutoff);
#pragma omp for schedule(static)
                for (long i = 0; i < np - 1; ++i) g[i] = 0.5 * (f[i] + f[i + 1]);
            }
#pragma omp for schedule(static)
            for (long i = 0; i < n; ++i)
                scalar_cell(w, f, g, orient, dx, eps, c0, use_cutoff, form, diff, out, i);
        }
    } else {
        if (need_flux) {
            for (long i = 0; i < np; ++i) f[i] = scalar_flux(w[i], c0, use_cutoff);
            for (long i = 0; i < np - 1; ++i) g[i] = 0.5 * (f[i] + f[i + 1]);
        }
        for (long i = 0; i < n; ++i)
            scalar_cell(w, f, g, orient, dx, eps, c0, use_cutoff, form, diff, out, i);
    }
}

void axpy(std::span<const double> a, double c, std::span<const double> b, std::span<double> out,
          Exec exec) {
    const long n = static_cast<long>(a.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) out[i] = a[i] + c * b[i];
    } else {
        for (long i = 0; i < n; ++i) out[i] = a[i] + c * b[i];
    }
}

namespace {

template <class Term>
double blocked(long n, Term term, Exec exec) {
    const long nb = (n + static_cast<long>(kBlock) - 1) / static_cast<long>(kBlock);
    std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
    auto block = [&](long j) {
        const long lo = j * static_cast<long>(kBlock);
        const long hi = std::min(n, lo + static_cast<long>(kBlock));
        double acc = 0.0;
        for (long i = lo; i < hi; ++i) acc += term(i);
        partial[static_cast<std::size_t>(j)] = acc;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long j = 0; j < nb; ++j) block(j);
    } else {
        for (long j = 0; j < nb; ++j) block(j);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace

double blocked_sum(std::span<const double> v, Exec exec) {
    return blocked(static_cast<long>(v.size()), [&](long i) { return v[i]; }, exec);
}

double central_gradient_sq_sum(std::span<const double> a_p, std::span<const double> b_p,
                               Exec exec) {
    const long n = static_cast<long>(a_p.size()) - 2;
    return blocked(
        n,
        [&](long i) {
            const double da = a_p[i + 2] - a_p[i];
            const double db = b_p[i + 2] - b_p[i];
            return da * da + db * db;
        },
        exec);
}

double sq_sum(std::span<const double> a, std::span<const double> b, Exec exec) {
    return blocked(
        static_cast<long>(a.size()), [&](long i) { return a[i] * a[i] + b[i] * b[i]; }, exec);
}

double max_speed_coupled(std::span<const double> sigma_p, std::span<const double> beta_p,
                         Exec exec) {
    const long n = static_cast<long>(sigma_p.size());
    double m = 0.0;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(max : m)
        for (long i = 0; i < n; ++i) {
            const double w1 = sigma_p[i] + beta_p[i];
            const double w2 = sigma_p[i] - beta_p[i];
            m = std::max(m, std::max(1.0 / w1, 1.0 / w2));
        }
    } else {
        for (long i = 0; i < n; ++i) {
            const double w1 = sigma_p[i] + beta_p[i];
            const double w2 = sigma_p[i] - beta_p[i];
            m = std::max(m, std::max(1.0 / w1, 1.0 / w2));
        }
    }
    return m;
}

}  // namespace carroll::kernels
