#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "semilab/semigroup.hpp"

using namespace semilab;

namespace {
constexpr double pi = 3.14159265358979323846;

double max_sample_diff(const Vector& a, const Vector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        d = std::max(d, std::abs(a.samples[i] - b.samples[i]));
    return d;
}
} // namespace

TEST_CASE("multiplication semigroup") {
    auto sem = multiplication_semigroup(1e-4);
    Vector one = Vector::from_evaluator(sem.space, [](double) { return 1.0; });

    Vector same = apply(sem, one, 0.0);
    CHECK(max_sample_diff(same, one) == 0.0);

    Vector x1 = apply(sem, one, 1.0);
    CHECK(std::abs(x1.eval(0.3) - 0.3) < 1e-12);

    // ||f_{k+1} - f_k|| = (1/(k+1)) (k/(k+1))^k for f = 1
    auto step_norm = [&](int k) {
        return norm(apply(sem, one, k + 1.0) - apply(sem, one, static_cast<double>(k)));
    };
    CHECK(std::abs(step_norm(1) - 0.25) < 1e-4);
    CHECK(std::abs(step_norm(4) - 0.08192) < 1e-4);
}

TEST_CASE("translation semigroup with limit") {
    auto sem = translation_limit_semigroup(100.0, 0.02);

    Vector c = Vector::from_evaluator(sem.space, [](double) { return 3.0; }, {}, 3.0);
    CHECK(max_sample_diff(apply(sem, c, 7.5), c) == 0.0);

    Vector f = Vector::from_evaluator(
        sem.space, [](double x) { return 1.0 + (x == 0.0 ? pi : std::sin(pi * x) / x); },
        {}, 1.0);
    Vector f5 = apply(sem, f, 5.0);
    CHECK(f5.limit_at_inf == 1.0);

    const double k = 100.0;
    const double d = norm(apply(sem, f, k + 1.0) - apply(sem, f, k));
    CHECK(k * d > 1.8);
    CHECK(k * d < 2.2);
}

TEST_CASE("shift-double discrete semigroup") {
    auto sem = shift_double_discrete(16);
    std::vector<double> e3(16, 0.0);
    e3[2] = 1.0;
    Vector v = Vector::from_samples(sem.space, e3);
    CHECK(norm(apply(sem, v, 3.0)) == 0.0);
    CHECK(norm(apply(sem, v, 2.0)) == 4.0);

    std::vector<double> geo(16);
    for (int j = 0; j < 16; ++j) geo[j] = std::ldexp(1.0, -(j + 1));
    Vector x = Vector::from_samples(sem.space, geo);
    const double n0 = norm(x);
    for (double n : {1.0, 4.0, 8.0})
        CHECK(std::abs(norm(apply(sem, x, n)) - n0) < 1e-4); // truncation tail only

    Vector zero = Vector::from_samples(sem.space, std::vector<double>(16, 0.0));
    CHECK(norm(apply(sem, zero, 5.0)) == 0.0);

    CHECK_THROWS_AS(apply(sem, v, 1.5), TimeDomainError);
    CHECK_THROWS_AS(apply(sem, v, -1.0), TimeDomainError);
}

TEST_CASE("jordan block flow") {
    CHECK(jordan_block_q({1.0, 0.0}, 9.0) == std::array<double, 2>{1.0, 0.0});
    CHECK(jordan_block_q({0.0, 1.0}, 5.0) == std::array<double, 2>{5.0, 1.0});
    const auto two_then_three = jordan_block_q(jordan_block_q({0.4, -1.1}, 2.0), 3.0);
    const auto direct = jordan_block_q({0.4, -1.1}, 5.0);
    CHECK(std::abs(two_then_three[0] - direct[0]) < 1e-14);
    CHECK(two_then_three[1] == direct[1]);
}

TEST_CASE("matrix exponential semigroup") {
    auto id = matrix_semigroup({{0.0, 0.0}, {0.0, 0.0}});
    Vector v = Vector::from_samples(id.space, {0.3, -0.8});
    CHECK(max_sample_diff(apply(id, v, 4.0), v) < 1e-15);

    auto jordan = matrix_semigroup({{0.0, 1.0}, {0.0, 0.0}});
    Vector vz = Vector::from_samples(jordan.space, {0.0, 1.0});
    Vector moved = apply(jordan, vz, 5.0);
    CHECK(std::abs(moved.samples[0] - 5.0) < 1e-12);
    CHECK(std::abs(moved.samples[1] - 1.0) < 1e-12);

    auto decay = matrix_semigroup({{-1.0}});
    Vector s = Vector::from_samples(decay.space, {1.0});
    CHECK(std::abs(apply(decay, s, 2.5).samples[0] - std::exp(-2.5)) < 1e-14);
    CHECK(semigroup_law_residual(decay, s, 0.7, 1.9) < 1e-12);
}

TEST_CASE("example 4 closed form vs direct quadrature") {
    auto sem = example4_semigroup(40.0, 0.05);
    Vector zero = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {0.0, 0.0});
    CHECK(norm(apply(sem, zero, 3.0)) == 0.0);

    const double y = 0.4, z = -0.9;
    Vector v = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {y, z});
    auto g = [](double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; };
    for (double t : {0.5, 2.0, 7.0}) {
        Vector vt = apply(sem, v, t);
        for (double x : {0.0, 1.0, 10.0, 25.0}) {
            auto integrand = [&](double s) { return g(x + s) * (y + (t - s) * z); };
            const double oracle = adaptive_simpson(integrand, 0.0, t, 1e-11).value;
            CHECK(std::abs(vt.eval(x) - oracle) < 1e-8);
        }
    }

    // the x Si term vanishes at x = 0: coupling of (0,0,1) over [t, t+1]
    const double t = 2.0;
    auto integrand = [&](double s) { return g(s) * s; };
    const double lhs = adaptive_simpson(integrand, t, t + 1.0, 1e-11).value;
    CHECK(std::abs(lhs - (std::cos(t) - std::cos(t + 1.0))) < 1e-10);
}

TEST_CASE("example 5 slow growth") {
    auto sem = example5_semigroup(100.0, 0.02);

    Vector f = Vector::from_evaluator(
        sem.space, [](double x) { return std::max(0.0, 1.0 - std::abs(x - 3.0)); }, {0.0});
    Vector ft = apply(sem, f, 2.0);
    CHECK(std::abs(ft.eval(0.5) - f.eval(2.5)) < 1e-12);

    Vector ey = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {1.0});
    for (double t : {1.0, 9.0, 99.0})
        CHECK(std::abs(apply(sem, ey, t).eval(0.0) - std::log(1.0 + t)) < 1e-12);
    CHECK(norm(apply(sem, ey, 1000.0)) / 1000.0 < 0.01);
}

TEST_CASE("semigroup law residuals for closed-form scenarios") {
    auto ex2 = multiplication_semigroup(1e-3);
    Vector f2 = Vector::from_evaluator(ex2.space, [](double x) { return 1.0 - 0.3 * x; });
    auto ex5 = example5_semigroup(60.0, 0.05);
    Vector f5 = Vector::from_evaluator(ex5.space, [](double x) { return std::exp(-x); }, {0.7});
    for (double t : {0.1, 0.7, 1.0, 2.5})
        for (double q : {0.1, 0.7, 1.0, 2.5}) {
            CHECK(semigroup_law_residual(ex2, f2, t, q) < 1e-8);
            CHECK(semigroup_law_residual(ex5, f5, t, q) < 1e-8);
        }
}

TEST_CASE("linearity of apply") {
    auto sem = example4_semigroup(40.0, 0.05);
    Vector v = Vector::from_evaluator(sem.space, [](double x) { return std::exp(-x); },
                                      {1.0, -0.5});
    Vector w = Vector::from_evaluator(sem.space, [](double x) { return std::cos(x); },
                                      {0.2, 0.9});
    Vector combined = linear_combination(2.0, v, -3.0, w);
    Vector lhs = apply(sem, combined, 1.7);
    Vector rhs = linear_combination(2.0, apply(sem, v, 1.7), -3.0, apply(sem, w, 1.7));
    CHECK(norm(lhs - rhs) < 1e-8 * (norm(v) + norm(w)));
}

TEST_CASE("duhamel extension") {
    const double x_max = 40.0, step = 0.02;

    SemigroupScenario alpha;
    alpha.name = "translation";
    alpha.space = AmbientSpace::grid_sup(0.0, x_max, step);
    alpha.evolve = [](const Vector& v, double t) -> Vector {
        if (t == 0.0) return v;
        const Vector f = v;
        return Vector::from_evaluator(v.space, [f, t](double x) { return f.eval(x + t); });
    };

    SECTION("replica of the slow 1/(x+1) coupling") {
        TriangularSpec spec;
        spec.alpha = alpha;
        spec.q_dim = 1;
        spec.q_apply = [](const std::vector<double>& b, double) { return b; };
        spec.p_columns = {
            Vector::from_evaluator(alpha.space, [](double x) { return 1.0 / (x + 1.0); })};
        auto sem = duhamel_extension(spec);

        Vector ey = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {1.0});
        auto closed = example5_semigroup(x_max, step);
        Vector ey_c = Vector::from_evaluator(closed.space, [](double) { return 0.0; }, {1.0});
        for (double t : {0.5, 1.0, 2.0})
            CHECK(max_sample_diff(apply(sem, ey, t), apply(closed, ey_c, t)) < 1e-5);

        CHECK(semigroup_law_residual(sem, ey, 1.0, 1.0) < 1e-5);

        // b = 0 reduces to pure translation, no quadrature
        Vector fc = Vector::from_evaluator(sem.space,
                                           [](double x) { return std::exp(-x); }, {0.0});
        Vector moved = apply(sem, fc, 3.0);
        CHECK(std::abs(moved.eval(1.0) - std::exp(-4.0)) < 1e-14);
        CHECK(moved.fin_part[0] == 0.0);
    }

    SECTION("replica of the Jordan-coupled sin(x)/x flow") {
        TriangularSpec spec;
        spec.alpha = alpha;
        spec.q_dim = 2;
        spec.q_apply = [](const std::vector<double>& b, double t) {
            return std::vector<double>{b[0] + t * b[1], b[1]};
        };
        spec.p_columns = {
            Vector::from_evaluator(alpha.space,
                                   [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }),
            Vector::from_evaluator(alpha.space, [](double) { return 0.0; })};
        auto sem = duhamel_extension(spec);

        auto closed = example4_semigroup(x_max, step);
        Vector v = Vector::from_evaluator(sem.space, [](double x) { return std::exp(-x); },
                                          {0.3, -0.7});
        Vector v_c = Vector::from_evaluator(closed.space, [](double x) { return std::exp(-x); },
                                            {0.3, -0.7});
        for (double t : {0.5, 1.0, 2.0})
            CHECK(max_sample_diff(apply(sem, v, t), apply(closed, v_c, t)) < 1e-5);

        // triangular structure: fin_part is independent of the core input
        Vector w = Vector::from_evaluator(sem.space, [](double x) { return std::cos(3.0 * x); },
                                          {0.3, -0.7});
        Vector vt = apply(sem, v, 1.5), wt = apply(sem, w, 1.5);
        CHECK(vt.fin_part == wt.fin_part);
    }

    SECTION("order of the quadrature error") {
        TriangularSpec spec;
        spec.alpha = alpha;
        spec.q_dim = 1;
        spec.q_apply = [](const std::vector<double>& b, double) { return b; };
        spec.p_columns = {
            Vector::from_evaluator(alpha.space, [](double x) { return 1.0 / (x + 1.0); })};
        auto closed = example5_semigroup(x_max, step);
        Vector ey_c = Vector::from_evaluator(closed.space, [](double) { return 0.0; }, {1.0});
        Vector exact = apply(closed, ey_c, 1.0);

        auto error_at = [&](double h) {
            TriangularSpec s = spec;
            s.quad_step = h;
            auto sem = duhamel_extension(s);
            Vector ey = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {1.0});
            return max_sample_diff(apply(sem, ey, 1.0), exact);
        };
        const double coarse = error_at(0.05), fine = error_at(0.025);
        CHECK(coarse / fine >= 4.0);
    }
}

TEST_CASE("growth class metadata") {
    CHECK(multiplication_semigroup(0.1).growth_class == GrowthClass::Bounded);
    CHECK(example5_semigroup(10.0, 0.1).growth_class == GrowthClass::Slow);
    CHECK(example4_semigroup(10.0, 0.1).growth_class == GrowthClass::Linear);
    CHECK(shift_double_discrete(8).growth_class == GrowthClass::UnboundedExponential);
}
