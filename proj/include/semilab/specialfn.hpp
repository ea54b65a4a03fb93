#pragma once

// Sine integral, adaptive quadrature and finite-difference utilities.

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

#include "semilab/errors.hpp"

namespace semilab {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

namespace detail {

// Maclaurin series sum (-1)^n x^(2n+1) / ((2n+1)(2n+1)!), compensated
// summation in long double to survive the cancellation near the switchover.
inline double si_series(double x) {
    const long double x2 = static_cast<long double>(x) * x;
    long double term = x; // n = 0 term of sin(s)/s integrated: x
    long double sum = 0.0L, comp = 0.0L;
    long double power = x; // x^(2n+1)/(2n+1)!
    for (int n = 0;; ++n) {
        term = power / static_cast<long double>(2 * n + 1);
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::abs(static_cast<double>(term)) < 1e-22 * (1.0 + std::abs(static_cast<double>(sum))))
            break;
        power *= -x2 / static_cast<long double>((2 * n + 2) * (2 * n + 3));
        if (n > 200) break;
    }
    return static_cast<double>(sum);
}

// Si(x) = pi/2 - cos(x)/x * P(x) - sin(x)/x^2 * Q(x) with the divergent
// asymptotic series P = sum (-1)^n (2n)!/x^(2n), Q = sum (-1)^n (2n+1)!/x^(2n),
// truncated at the smallest term.
inline double si_asymptotic(double x) {
    const double x2 = x * x;
    double p = 0.0, q = 0.0;
    double tp = 1.0, tq = 1.0; // magnitudes of the current terms
    double sign = 1.0;
    for (int n = 0;; ++n) {
        p += sign * tp;
        q += sign * tq;
        const double np = tp * (2.0 * n + 1.0) * (2.0 * n + 2.0) / x2;
        const double nq = tq * (2.0 * n + 2.0) * (2.0 * n + 3.0) / x2;
        if (np >= tp || nq >= tq) break; // divergence sets in
        tp = np;
        tq = nq;
        sign = -sign;
        if (tp < 1e-18 && tq < 1e-18) {
            p += sign * tp;
            q += sign * tq;
            break;
        }
    }
    constexpr double half_pi = 1.57079632679489661923;
    return half_pi - std::cos(x) / x * p - std::sin(x) / x2 * q;
}

// Both expansions reach ~1e-11 at this point in double precision.
constexpr double si_switchover = 24.0;

} // namespace detail

/// Sine integral Si(x) = int_0^x sin(s)/s ds, extended to x < 0 by oddness.
/// Absolute accuracy better than 1e-10 over the whole real line.
inline double si(double x) {
    if (x < 0.0) return -si(-x);
    if (x == 0.0) return 0.0;
    if (x <= detail::si_switchover) return detail::si_series(x);
    return detail::si_asymptotic(x);
}

namespace detail {

struct SimpsonState {
    const std::function<double(double)>* f;
    long evaluations = 0;
    double eval(double x) {
        ++evaluations;
        return (*f)(x);
    }
};

inline std::pair<double, double> simpson_recurse(SimpsonState& st, double a, double b,
                                                 double fa, double fm, double fb,
                                                 double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = st.eval(lm), frm = st.eval(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return {left + right + delta / 15.0, std::abs(delta) / 15.0};
    if (depth <= 0)
        throw QuadratureFailureError("adaptive Simpson recursion depth exhausted");
    auto [lv, le] = simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    auto [rv, re] = simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    return {lv + rv, le + re};
}

} // namespace detail

/// Adaptive Simpson quadrature with Richardson acceptance.
inline QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                         double a, double b, double tol) {
    if (!(tol > 0.0)) throw Error("adaptive_simpson needs tol > 0");
    if (a == b) return {0.0, 0.0, 0};
    detail::SimpsonState st{&f};
    const double fa = st.eval(a), fb = st.eval(b);
    const double m = 0.5 * (a + b);
    const double fm = st.eval(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    auto [value, err] = detail::simpson_recurse(st, a, b, fa, fm, fb, whole, tol, 52);
    return {value, err, st.evaluations};
}

/// Forward difference (f(t+h) - f(t)) / h for a vector- or scalar-valued
/// function of time. Forward rather than centered: semigroups are one-sided.
template <class F>
auto finite_diff(F&& f, double t, double h) {
    if (!(h > 0.0)) throw Error("finite_diff needs h > 0");
    auto hi = f(t + h);
    auto lo = f(t);
    if constexpr (std::is_same_v<decltype(hi), double>) {
        return (hi - lo) / h;
    } else {
        return scaled(1.0 / h, hi - lo);
    }
}

} // namespace semilab
