#include "carroll/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "carroll/errors.hpp"

namespace carroll {

namespace {

struct Panel {
    const std::function<double(double)>& f;
    int min_depth;
    int max_depth;

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth >= min_depth && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        if (depth >= max_depth) {
            std::ostringstream os;
            os << "adaptive_simpson: no convergence on [" << a << ", " << b << "] (error estimate "
               << std::abs(delta) / 15.0 << ")";
            throw NumericalError(os.str());
        }
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    double eval(double x) const {
        const double v = f(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "adaptive_simpson: integrand not finite at s = " << x;
            throw NumericalError(os.str());
        }
        return v;
    }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    if (b < a) return -adaptive_simpson(f, b, a, opts);
    Panel p{f, opts.min_depth, opts.max_depth};
    const double fa = p.eval(a);
    const double fb = p.eval(b);
    const double fm = p.eval(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return p.recurse(a, b, fa, fm, fb, whole, opts.abs_tol, 0);
}

}  // namespace carroll
