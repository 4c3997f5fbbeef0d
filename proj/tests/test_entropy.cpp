#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "carroll/entropy.hpp"
#include "carroll/errors.hpp"

using namespace carroll;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

TestFunctionPair f_quarter_square() {
    return TestFunctionPair::from_f([](double s) { return 0.25 * s * s; }, [](double s) { return 0.5 * s; },
                                    [](double) { return 0.5; }, "s^2/4");
}

TestFunctionPair f_linear() {
    return TestFunctionPair::from_f([](double s) { return s; }, [](double) { return 1.0; },
                                    [](double) { return 0.0; }, "s");
}

std::pair<double, double> random_admissible(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> w(0.3, 4.0);
    const double w1 = w(rng), w2 = w(rng);
    return {0.5 * (w1 + w2), 0.5 * (w1 - w2)};
}

}  // namespace

TEST_CASE("test pair validation") {
    CHECK_NOTHROW(validate_test_pair(f_quarter_square()));
    CHECK_THROWS_AS(validate_test_pair(f_linear()), AdmissibilityError);
    try {
        validate_test_pair(f_linear());
    } catch (const AdmissibilityError& e) {
        CHECK(std::string(e.what()).find("f'(0)") != std::string::npos);
    }
    CHECK_NOTHROW(validate_test_pair(
        TestFunctionPair::from_g([](double s) { return s * s; }, [](double s) { return 2 * s; }, "s^2")));
    const auto g_one = TestFunctionPair::from_g([](double) { return 1.0; }, [](double) { return 0.0; }, "1");
    CHECK_THROWS_AS(validate_test_pair(g_one), AdmissibilityError);
    try {
        validate_test_pair(g_one);
    } catch (const AdmissibilityError& e) {
        CHECK(std::string(e.what()).find("g(0)") != std::string::npos);
    }
    CHECK_THROWS_AS(make_entropy_pair_1(f_linear()), AdmissibilityError);
    // f'' unbounded near the origin
    const auto wild = TestFunctionPair::from_f([](double s) { return s * s * std::log(std::fabs(s) + 1e-300); },
                                               [](double s) { return s == 0 ? 0.0 : s * (2 * std::log(std::fabs(s)) + 1); },
                                               [](double s) { return s == 0 ? -INFINITY : 2 * std::log(std::fabs(s)) + 3; },
                                               "s^2 log|s|");
    CHECK_THROWS_AS(validate_test_pair(wild), AdmissibilityError);
}

TEST_CASE("f = s^2/4 generates the special pair on a 50 x 50 lattice") {
    const EntropyPairEval p = make_entropy_pair_1(f_quarter_square());
    CHECK(p.eta(2.0, 1.0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(p.q(2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double sg = 0.2 + 4.8 * i / 49.0;
        for (int j = 0; j < 50; ++j) {
            const double b = sg * (-0.98 + 1.96 * j / 49.0);
            worst = std::max({worst, std::fabs(p.eta(sg, b) - 0.5 * (sg * sg + b * b)),
                              std::fabs(p.q(sg, b) - b)});
        }
    }
    CHECK(worst <= 1e-10);

    const EntropyPairEval c = special_pair_closed_form();
    CHECK(c.eta(2.0, 1.0) == 2.5);
    CHECK(c.q(2.0, 1.0) == 1.0);
    const Mat2 H = p.hessian_eta(1.7, -0.4);
    CHECK((H - Mat2::identity()).max_abs() <= 1e-12);
}

TEST_CASE("quartic generator against exact integration") {
    const EntropyPairEval p = catalog_pair("quartic");
    CHECK(p.eta(2.0, 1.0) == doctest::Approx(82.0).epsilon(1e-15));
    CHECK(p.q(2.0, 1.0) == doctest::Approx(104.0 / 3.0).epsilon(1e-12));
    // K(x) = 4 x^3 / 3
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        auto [sg, b] = random_admissible(rng);
        const double a = b + sg, m = b - sg;
        CHECK(p.q(sg, b) == doctest::Approx(4.0 * (a * a * a + m * m * m) / 3.0).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("g generators against exact antiderivatives and Gauss-Kronrod") {
    const EntropyPairEval lin = make_entropy_pair_2(
        TestFunctionPair::from_g([](double s) { return s; }, [](double) { return 1.0; }, "s"));
    CHECK(lin.eta(2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(lin.q(2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
    const EntropyPairEval quad = catalog_pair("quadratic-g");
    CHECK(quad.eta(2.0, 1.0) == doctest::Approx(28.0 / 3.0).epsilon(1e-12));
    CHECK(quad.q(2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
    const EntropyPairEval zero = make_entropy_pair_2(TestFunctionPair{});
    CHECK(zero.eta(2.0, 1.0) == 0.0);
    CHECK(zero.q(2.0, 1.0) == 0.0);

    const EntropyPairEval cub = catalog_pair("cubic-g");
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
        auto [sg, b] = random_admissible(rng);
        const double ref_eta = gk([](double s) { return s * s * s; }, b - sg, b + sg);
        const double ref_q = gk([](double s) { return s * s; }, b - sg, b + sg);
        CHECK(std::fabs(cub.eta(sg, b) - ref_eta) <= 1e-9 * (1 + std::fabs(ref_eta)));
        CHECK(std::fabs(cub.q(sg, b) - ref_q) <= 1e-9 * (1 + std::fabs(ref_q)));
    }
}

TEST_CASE("entropy equation residual") {
    CHECK(entropy_equation_residual(special_pair_closed_form(), 2.0, 1.0) == 0.0);
    CHECK(std::fabs(entropy_equation_residual(catalog_pair("quartic"), 2.0, 1.0, 1e-4)) <= 1e-5);
}

TEST_CASE("catalog pairs satisfy both relations at 100 random admissible points") {
    std::mt19937_64 rng(2025);
    for (const std::string& name : catalog_names()) {
        const EntropyPairEval p = catalog_pair(name);
        double eq = 0.0, comp = 0.0;
        for (int k = 0; k < 100; ++k) {
            auto [sg, b] = random_admissible(rng);
            eq = std::max(eq, std::fabs(entropy_equation_residual(p, sg, b)));
            comp = std::max(comp, norm2(entropy_compatibility_residual(p, sg, b)));
        }
        INFO(name);
        CHECK(eq <= 1e-5);
        CHECK(comp <= 1e-5);
    }
}

TEST_CASE("compatibility residual examples") {
    const Vec2 r = entropy_compatibility_residual(special_pair_closed_form(), 2.0, 1.0);
    CHECK(std::fabs(r[0]) <= 1e-9);
    CHECK(std::fabs(r[1]) <= 1e-9);
    const Vec2 z = entropy_compatibility_residual(make_entropy_pair(TestFunctionPair{}), 2.0, 1.0);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
}

TEST_CASE("negative controls") {
    // f = s forced through: eta = 2 beta still solves the wave equation, so the
    // defect appears in the flux, whose kernel 1/s is not integrable at 0.
    const EntropyPairEval forced = make_entropy_pair_1(f_linear(), Validation::skip);
    CHECK(forced.eta(2.0, 0.3) == doctest::Approx(0.6));
    CHECK(std::fabs(entropy_equation_residual(forced, 2.0, 0.3)) <= 1e-9);
    CHECK_THROWS_AS(forced.q(2.0, 0.3), NumericalError);
    CHECK_THROWS_AS(entropy_compatibility_residual(forced, 2.0, 0.3), NumericalError);

    // eta = sigma^4 is no entropy: residual 12 sigma^3 (beta^2 - sigma^2)^2
    EntropyPairEval bad;
    bad.eta = [](double s, double) { return s * s * s * s; };
    bad.q = [](double, double) { return 0.0; };
    std::mt19937_64 rng(8);
    for (int k = 0; k < 50; ++k) {
        auto [sg, b] = random_admissible(rng);
        const double d = b * b - sg * sg;
        CHECK(entropy_equation_residual(bad, sg, b) ==
              doctest::Approx(12.0 * sg * sg * sg * d * d).epsilon(1e-4));
    }
    // a pair with the wrong flux fails compatibility
    EntropyPairEval wrong_flux = special_pair_closed_form();
    wrong_flux.grad_q = nullptr;
    wrong_flux.q = [](double, double b) { return 2.0 * b; };
    CHECK(norm2(entropy_compatibility_residual(wrong_flux, 2.0, 1.0)) == doctest::Approx(1.0));
}

TEST_CASE("convexity certificates classify the catalog") {
    const double slo = 1.0, shi = 3.0, blo = -0.8, bhi = 0.8;
    CHECK(certify_convexity(catalog_pair("special"), slo, shi, blo, bhi).convex);
    CHECK(certify_convexity(catalog_pair("quartic"), slo, shi, blo, bhi).convex);
    CHECK(certify_convexity(catalog_pair("quadratic-g"), slo, shi, blo, bhi).convex);
    const ConvexityCertificate cc = certify_convexity(catalog_pair("concave-control"), slo, shi, blo, bhi);
    CHECK_FALSE(cc.convex);
    CHECK(cc.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK_FALSE(certify_convexity(catalog_pair("linear-g"), slo, shi, blo, bhi).convex);
    CHECK_FALSE(certify_convexity(catalog_pair("cubic-g"), slo, shi, blo, bhi).convex);
    const ConvexityCertificate sc = certify_convexity(catalog_pair("special"), slo, shi, blo, bhi, 11, 50, 1);
    CHECK(sc.points_checked == 11 * 11 + 50);
    CHECK(sc.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("generator linearity") {
    const auto f1 = f_quarter_square();
    const auto f2 = catalog_test_pair("quartic");
    const auto both = TestFunctionPair::from_f([&](double s) { return f1.f(s) + f2.f(s); },
                                               [&](double s) { return f1.fp(s) + f2.fp(s); },
                                               [&](double s) { return f1.fpp(s) + f2.fpp(s); }, "sum");
    const EntropyPairEval pa = make_entropy_pair_1(f1), pb = make_entropy_pair_1(f2), pab = make_entropy_pair_1(both);
    const EntropyPairEval ps = sum(pa, pb);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 50; ++k) {
        auto [sg, b] = random_admissible(rng);
        CHECK(std::fabs(pab.eta(sg, b) - ps.eta(sg, b)) <= 1e-12 * (1 + std::fabs(ps.eta(sg, b))));
        CHECK(std::fabs(pab.q(sg, b) - ps.q(sg, b)) <= 1e-9 * (1 + std::fabs(ps.q(sg, b))));
    }
    const EntropyPairEval half = scaled(pa, 0.5);
    CHECK(half.eta(2.0, 1.0) == doctest::Approx(1.25));
    CHECK(half.q(2.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("closed-form derivatives match finite differences") {
    std::mt19937_64 rng(12);
    for (const char* name : {"quartic", "quadratic-g", "cubic-g"}) {
        const EntropyPairEval p = catalog_pair(name);
        for (int k = 0; k < 20; ++k) {
            auto [sg, b] = random_admissible(rng);
            const double h = 1e-5;
            const Vec2 g = p.gradient_eta(sg, b);
            const double ds = (p.eta(sg + h, b) - p.eta(sg - h, b)) / (2 * h);
            const double db = (p.eta(sg, b + h) - p.eta(sg, b - h)) / (2 * h);
            INFO(name);
            CHECK(std::fabs(g[0] - ds) <= 1e-5 * (1 + std::fabs(ds)));
            CHECK(std::fabs(g[1] - db) <= 1e-5 * (1 + std::fabs(db)));
            const Vec2 gq = p.gradient_q(sg, b);
            const double qs = (p.q(sg + h, b) - p.q(sg - h, b)) / (2 * h);
            CHECK(std::fabs(gq[0] - qs) <= 1e-4 * (1 + std::fabs(qs)));
        }
    }
}
