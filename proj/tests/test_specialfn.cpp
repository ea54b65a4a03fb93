#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "semilab/semigroup.hpp"
#include "semilab/specialfn.hpp"

using namespace semilab;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("si basic values") {
    CHECK(si(0.0) == 0.0);
    // Frozen oracle: adaptive Simpson of sin(s)/s on [0, pi] at tol 1e-12.
    CHECK(std::abs(si(pi) - 1.851937051982466) < 1e-9);
    CHECK(si(-2.0) == -si(2.0));
}

TEST_CASE("si monotone on [0, pi] and globally bounded") {
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = si(pi * i / 100.0);
        CHECK(v >= prev);
        prev = v;
    }
    for (double x : {0.1, 1.0, pi, 5.0, 16.0, 24.0, 50.0, 333.0}) {
        const double v = si(x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.8520);
    }
}

TEST_CASE("si asymptotic tail bound") {
    constexpr double half_pi = 0.5 * pi;
    for (double x : {16.0, 30.0, 100.0, 1000.0})
        CHECK(std::abs(si(x) - half_pi) <= 2.0 / x);
    // Two-term asymptotic at x = 100; the neglected term is 2 cos(x)/x^3.
    const double two_term = half_pi - std::cos(100.0) / 100.0 - std::sin(100.0) / 1e4;
    CHECK(std::abs(si(100.0) - two_term) < 2.5 / 1e6);
}

TEST_CASE("si series and asymptotic branches agree at the switchover") {
    const double x = detail::si_switchover;
    CHECK(std::abs(detail::si_series(x) - detail::si_asymptotic(x)) <= 1e-9);
}

TEST_CASE("adaptive Simpson on polynomials and trig") {
    auto sq = [](double x) { return x * x; };
    auto r = adaptive_simpson(sq, 0.0, 1.0, 1e-12);
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-12);

    auto integrand = [](double s) { return std::sin(s); };
    auto r2 = adaptive_simpson(integrand, 2.0, 3.0, 1e-10);
    const double exact = std::cos(2.0) - std::cos(3.0);
    CHECK(std::abs(r2.value - exact) < 1e-10);
    CHECK(std::abs(r2.value - exact) <= r2.error_estimate + 1e-12);

    auto r3 = adaptive_simpson(integrand, 0.0, pi, 1e-9);
    CHECK(std::abs(r3.value - 2.0) <= r3.error_estimate + 1e-10);
}

TEST_CASE("adaptive Simpson cross-checks si") {
    auto sinc = [](double s) { return s == 0.0 ? 1.0 : std::sin(s) / s; };
    auto r = adaptive_simpson(sinc, 0.0, pi, 1e-12);
    CHECK(std::abs(r.value - si(pi)) < 1e-10);
}

TEST_CASE("adaptive Simpson argument checks") {
    auto f = [](double) { return 1.0; };
    CHECK_THROWS_AS(adaptive_simpson(f, 0.0, 1.0, 0.0), Error);
    CHECK(adaptive_simpson(f, 2.0, 2.0, 1e-6).value == 0.0);
}

TEST_CASE("finite differences") {
    auto constant = [](double) { return 7.0; };
    CHECK(finite_diff(constant, 1.0, 1e-4) == 0.0);

    auto smooth = [](double t) { return std::sin(t); };
    CHECK(std::abs(finite_diff(smooth, 0.3, 1e-5) - std::cos(0.3)) < 1e-4);

    // Jordan flow at (0,1): derivative (1,0).
    auto sem = remark2_jordan_semigroup();
    Vector v = Vector::from_samples(sem.space, {0.0, 1.0});
    auto orbit = [&](double t) { return apply(sem, v, t); };
    Vector d = finite_diff(orbit, 0.0, 1e-6);
    CHECK(std::abs(d.samples[0] - 1.0) < 1e-9);
    CHECK(std::abs(d.samples[1]) < 1e-9);

    CHECK_THROWS_AS(finite_diff(constant, 0.0, 0.0), Error);
}
