#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nestlab/maps.hpp"

using namespace nestlab;

namespace {
double uniform(std::mt19937_64& rng, double lo, double hi) {
    double u = double(rng() >> 11) * 0x1p-53;
    return lo + (hi - lo) * u;
}
} // namespace

TEST_CASE("quadratic evaluation identities") {
    MapFamily f = MapFamily::quadratic(2.0);
    CHECK(eval_map(f, 0.0) == 1.0);
    CHECK(eval_map(f, 1.0) == -1.0);
    CHECK(eval_map(f, -1.0) == -1.0);
    CHECK_THROWS_AS(eval_map(f, 1.5), Error);
    CHECK(eval_map(f, 1.5, true) == doctest::Approx(2.0 - 1.0 - 2.0 * 2.25));
}

TEST_CASE("perturbed family with lambda=0 equals the base map") {
    Polynomial w({0.0, 1.0, 0.0, -1.0}); // x - x^3, odd, vanishes at +-1
    MapFamily p = MapFamily::perturbed(1.7, w, 0.0);
    MapFamily q = MapFamily::quadratic(1.7);
    for (double x : {-1.0, -0.3, 0.0, 0.5, 0.99})
        CHECK(eval_map(p, x) == doctest::Approx(eval_map(q, x)).epsilon(1e-15));
}

TEST_CASE("derivatives: closed forms and non-degeneracy") {
    MapFamily f = MapFamily::quadratic(2.0);
    CHECK(deriv_map(f, -1.0, 1) == doctest::Approx(4.0));
    for (double tau : {0.7, 1.3, 1.9})
        CHECK(deriv_map(MapFamily::quadratic(tau), 0.0, 2) == doctest::Approx(-2.0 * tau));
}

TEST_CASE("complex 2-cycle multiplier equals 4(c+1)") {
    // 2-cycle of z^2+c: roots of z^2 + z + c + 1; chain rule gives 4 z1 z2 = 4(c+1)
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 100; ++i) {
        Complex c(uniform(rng, -1.2, -0.8), uniform(rng, -0.2, 0.2));
        if (std::abs(c + 1.0) >= 0.25) { --i; continue; } // stay in the period-2 disk
        Complex disc = std::sqrt(Complex(-3.0, 0.0) - 4.0 * c);
        Complex z1 = (-1.0 + disc) / 2.0, z2 = (-1.0 - disc) / 2.0;
        MapFamily f = MapFamily::complex_quadratic(c);
        Complex mult = deriv_map(f, z1) * deriv_map(f, z2);
        CHECK(std::abs(mult - 4.0 * (c + 1.0)) < 1e-10);
    }
    MapFamily f = MapFamily::complex_quadratic(Complex(-1.0, 0.0));
    CHECK(std::abs(deriv_map(f, Complex(0, 0)) * deriv_map(f, Complex(-1, 0))) < 1e-14);
}

TEST_CASE("schwarzian of quadratic maps") {
    MapFamily f = MapFamily::quadratic(1.4);
    CHECK(schwarzian(f, 0.5) == doctest::Approx(-6.0));
    CHECK_THROWS_AS(schwarzian(f, 0.0), Error);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        double x = uniform(rng, -1.0, 1.0);
        if (std::abs(x) < 1e-3) continue;
        CHECK(schwarzian(f, x) < 0.0);
    }
}

TEST_CASE("schwarzian of perturbed maps stays negative for small odd fields") {
    Polynomial w({0.0, 1.0, 0.0, -1.0});
    MapFamily p = MapFamily::perturbed(1.8, w, 0.05);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        double x = uniform(rng, -0.95, 0.95);
        if (std::abs(x) < 5e-3) continue;
        CHECK(schwarzian(p, x) < 0.0);
    }
}

TEST_CASE("symmetry of even real kinds") {
    std::mt19937_64 rng(99);
    MapFamily q = MapFamily::quadratic(1.77);
    Polynomial w({0.0, 0.4, 0.0, -0.4});
    MapFamily p = MapFamily::perturbed(1.77, w, 0.03);
    for (int i = 0; i < 10000; ++i) {
        double x = uniform(rng, -1.0, 1.0);
        double fq = eval_map(q, x);
        CHECK(std::abs(fq - eval_map(q, -x)) < 1e-14 * (1.0 + std::abs(fq)));
        double fp = eval_map(p, x);
        CHECK(std::abs(fp - eval_map(p, -x)) < 1e-14 * (1.0 + std::abs(fp)));
    }
}

TEST_CASE("derivative agrees with central finite differences") {
    std::mt19937_64 rng(2024);
    Polynomial w({0.0, 0.3, 0.0, -0.3});
    MapFamily fams[] = {MapFamily::quadratic(1.9), MapFamily::perturbed(1.6, w, 0.04)};
    for (const MapFamily& f : fams) {
        for (int i = 0; i < 1000; ++i) {
            double x = uniform(rng, -0.99, 0.99);
            double h = 1e-6;
            double fd = (eval_map(f, x + h) - eval_map(f, x - h)) / (2 * h);
            double d = deriv_map(f, x, 1);
            CHECK(std::abs(fd - d) <= 1e-6 * (1.0 + std::abs(d)));
        }
    }
}

TEST_CASE("bump field endpoint flatness and center value") {
    for (int n = 1; n <= 50; ++n) {
        CHECK(std::abs(special_bump_field(n, 1.0)) < 1e-12);
        CHECK(std::abs(special_bump_field(n, -1.0)) < 1e-12);
        CHECK(std::abs(special_bump_field_deriv(n, 1.0)) < 1e-12);
        CHECK(std::abs(special_bump_field_deriv(n, -1.0)) < 1e-12);
    }
    double expected = (1.0 - std::exp(-2.0)) + 2.0 * (2.0 * std::exp(-1.0) - std::exp(-2.0) - 1.0);
    CHECK(special_bump_field(1, 0.0) == doctest::Approx(expected).epsilon(1e-15));
    // derivative formula vs finite differences
    for (double z : {-0.7, -0.2, 0.3, 0.9}) {
        double h = 1e-7;
        double fd = (special_bump_field(4, z + h) - special_bump_field(4, z - h)) / (2 * h);
        CHECK(special_bump_field_deriv(4, z) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("rescaled bump vanishes flat at the A1 endpoints") {
    BumpFieldSpec s{3, 0.25, 0.65, 0.05};
    CHECK(std::abs(bump_field_value(s, s.a_lo)) < 1e-12);
    CHECK(std::abs(bump_field_value(s, s.a_hi)) < 1e-12);
    CHECK(std::abs(bump_field_deriv(s, s.a_lo)) < 1e-12);
    CHECK(std::abs(bump_field_deriv(s, s.a_hi)) < 1e-12);
}

TEST_CASE("bump polynomial is odd, vanishes at +-1, tracks the odd part") {
    BumpFieldSpec s{2, 0.3, 0.6, 0.05};
    Polynomial w = bump_polynomial(s, 17, true);
    CHECK(w.is_odd(1e-13));
    CHECK(std::abs(w.value(1.0)) < 1e-10);
    CHECK(std::abs(w.value(-1.0)) < 1e-10);
    double worst = 0;
    for (int i = 0; i <= 400; ++i) {
        double x = -1.0 + 2.0 * i / 400;
        double target = 0.5 * (bump_field_value(s, x) - bump_field_value(s, -x));
        worst = std::max(worst, std::abs(w.value(x) - target));
    }
    CHECK(worst < 0.02 * s.amplitude);
}

TEST_CASE("make_perturbed_family validation") {
    Polynomial zero;
    auto r0 = make_perturbed_family(1.8, zero, -1.0, 1.0);
    CHECK(r0.report.valid);
    MapFamily f0 = r0.family->at(0.7);
    CHECK(eval_map(f0, 0.25) == doctest::Approx(eval_map(MapFamily::quadratic(1.8), 0.25)));

    Polynomial parab({1.0, 0.0, -1.0}); // 1 - x^2
    auto r1 = make_perturbed_family(1.8, parab, -0.01, 0.01);
    CHECK(r1.report.valid);

    auto r2 = make_perturbed_family(1.8, parab, -10.0, 10.0);
    CHECK_FALSE(r2.report.valid);
    CHECK(r2.report.has_bad_lambda);
    CHECK(std::abs(r2.report.first_bad_lambda) > 0.45);
    CHECK(std::abs(r2.report.first_bad_lambda) < 0.65);
    CHECK_THROWS_AS((void)r1.family->at(0.5), Error);
}

TEST_CASE("validate_unimodal locates the critical point of an asymmetric map") {
    Polynomial parab({1.0, 0.0, -1.0});
    MapFamily f = MapFamily::perturbed(1.8, parab, 0.01);
    UnimodalReport rep = validate_unimodal(f);
    CHECK(rep.valid);
    // g(x) = x + 0.01(1-x^2); g(xc) = 0
    double xc = rep.critical_point;
    CHECK(std::abs(xc + 0.01 * (1 - xc * xc)) < 1e-12);
    CHECK(deriv_map(f, xc, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("conjugacy q_tau ~ z^2 + c via h(x) = -tau x") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        double tau = uniform(rng, 0.6, 2.0);
        Complex c = conjugacy_c(tau);
        CHECK(c.real() == doctest::Approx(-(tau * tau - tau)));
        CHECK(conjugacy_a(tau) == doctest::Approx(tau * tau - tau));
        MapFamily q = MapFamily::quadratic(tau);
        MapFamily pc = MapFamily::complex_quadratic(c);
        double x = uniform(rng, -1.0, 1.0);
        Complex lhs(-tau * eval_map(q, x), 0.0);
        Complex rhs = eval_map(pc, Complex(-tau * x, 0.0));
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("real_map promotes parameters to BigFloat exactly") {
    MapFamily f = MapFamily::quadratic(1.75);
    auto md = real_map<double>(f);
    auto mb = real_map<BigFloat>(f);
    double xd = md(0.3125); // dyadic input: both paths are exact
    BigFloat xb = mb(BigFloat(0.3125));
    CHECK(to_double(xb) == doctest::Approx(xd).epsilon(1e-17));
    Polynomial parab({1.0, 0.0, -1.0});
    MapFamily asym = MapFamily::perturbed(1.8, parab, 0.01);
    CHECK_THROWS_AS((void)real_map<double>(asym), Error);
}
