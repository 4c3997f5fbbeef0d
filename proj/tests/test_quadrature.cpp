#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "carroll/errors.hpp"
#include "carroll/quadrature.hpp"

using namespace carroll;

TEST_CASE("polynomials and smooth integrands") {
    CHECK(adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-10));
    const auto f = [](double x) { return std::exp(-x * x) * std::cos(3 * x); };
    const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -2.0, 1.5, 15, 1e-14);
    CHECK(std::fabs(adaptive_simpson(f, -2.0, 1.5) - ref) <= 1e-10);
}

TEST_CASE("reversed limits give the signed integral") {
    const auto f = [](double x) { return 4.0 * x * x; };
    CHECK(adaptive_simpson(f, 0.0, -1.0) == doctest::Approx(-4.0 / 3.0).epsilon(1e-13));
    CHECK(adaptive_simpson(f, 1.0, 1.0) == 0.0);
}

TEST_CASE("a few-sample integrand is not accepted on the first panel") {
    // A narrow bump that the five coarse samples miss.
    const auto f = [](double x) { return std::exp(-1e4 * (x - 0.3) * (x - 0.3)); };
    CHECK(adaptive_simpson(f, 0.0, 1.0) == doctest::Approx(std::sqrt(M_PI) / 100.0).epsilon(1e-8));
}

TEST_CASE("non-finite integrands and divergence raise numerical errors") {
    CHECK_THROWS_AS(adaptive_simpson([](double) { return NAN; }, 0.0, 1.0), NumericalError);
    QuadratureOptions tight;
    tight.max_depth = 6;
    try {
        adaptive_simpson([](double x) { return x == 0.0 ? 0.0 : 1.0 / x; }, 0.0, 1.0, tight);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find('[') != std::string::npos);
    }
}
