#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "semilab/space.hpp"

using namespace semilab;

namespace {

// R^2 with the sup norm, realized as the two-point grid {0, 1}.
SpacePtr r2_sup() { return AmbientSpace::grid_sup(0.0, 1.0, 1.0); }

Vector vec2(const SpacePtr& s, double a, double b) {
    return Vector::from_samples(s, {a, b});
}

// Brute-force oracle for dim-1 minimax distance: dense beta grid.
double brute_force_distance(const Vector& v, const Vector& e, double lo, double hi,
                            double step) {
    double best = std::numeric_limits<double>::infinity();
    for (double beta = lo; beta <= hi; beta += step)
        best = std::min(best, norm(v - scaled(beta, e)));
    return best;
}

} // namespace

TEST_CASE("norms per space kind") {
    auto grid = AmbientSpace::grid_sup(0.0, 1.0, 1e-4);
    Vector one = Vector::from_evaluator(grid, [](double) { return 1.0; });
    CHECK(norm(one) == 1.0);

    Vector hump = Vector::from_evaluator(grid, [](double x) { return x * x - x; });
    CHECK(std::abs(norm(hump) - 0.25) < 1e-4);

    auto l2 = AmbientSpace::seq_l2(3);
    CHECK(std::abs(norm(Vector::from_samples(l2, {3.0, 4.0, 0.0})) - 5.0) < 1e-14);

    auto prod = AmbientSpace::product_sum(AmbientSpace::grid_sup(0.0, 1.0, 0.5), 2);
    Vector pv = Vector::from_samples(prod, {0.0, 0.0, 0.0}, {0.0, 1.0});
    CHECK(norm(pv) == 1.0);

    auto lim = AmbientSpace::grid_sup_with_limit(0.0, 10.0, 0.1);
    Vector tail = Vector::from_evaluator(lim, [](double x) { return 1.0 / (1.0 + x); }, {}, 0.0);
    CHECK(std::abs(norm(tail) - 1.0) < 1e-12);
    Vector shifted = Vector::from_evaluator(lim, [](double) { return 0.25; }, {}, 0.75);
    CHECK(norm(shifted) == 0.75); // the limit dominates the samples
}

TEST_CASE("vector validation") {
    auto grid = AmbientSpace::grid_sup(0.0, 1.0, 0.5);
    CHECK_THROWS_AS(Vector::from_samples(grid, {1.0, 2.0}), MalformedVectorError);
    CHECK_THROWS_AS(AmbientSpace::grid_sup(0.0, 1.0, 0.3), Error);
    // samples and evaluator must agree
    CHECK_THROWS_AS(Vector::from_both(grid, {0.0, 0.0, 0.0}, [](double x) { return x; }),
                    MalformedVectorError);
    Vector ok = Vector::from_both(grid, {0.0, 0.5, 1.0}, [](double x) { return x; });
    CHECK(ok.eval(0.25) == 0.25);
}

TEST_CASE("distance to subspace in sup-norm R^2") {
    auto s = r2_sup();
    auto span_e2 = Subspace::span({vec2(s, 0.0, 1.0)});

    auto r = distance_to_subspace(vec2(s, 1.0, 0.0), span_e2);
    CHECK(std::abs(r.value - 1.0) < 1e-6);
    CHECK(std::abs(r.coefficients[0]) < 1e-6);

    // member of the span
    CHECK(distance_to_subspace(vec2(s, 0.0, 3.0), span_e2).value < 1e-8);
}

TEST_CASE("minimax agrees with brute force on R^2 sup-norm instances") {
    auto s = r2_sup();
    struct Case {
        double vx, vy, ex, ey;
    };
    for (const Case& c : {Case{1.0, 0.0, 0.0, 1.0}, Case{0.7, -0.3, 1.0, 1.0},
                          Case{2.0, 1.0, 1.0, -0.5}, Case{-1.0, 4.0, 0.3, 1.0}}) {
        Vector v = vec2(s, c.vx, c.vy);
        Vector e = vec2(s, c.ex, c.ey);
        const double solved = distance_to_subspace(v, Subspace::span({e})).value;
        const double brute = brute_force_distance(v, e, -10.0, 10.0, 1e-4);
        CHECK(std::abs(solved - brute) < 1e-3);
    }
}

TEST_CASE("distance invariants") {
    auto grid = AmbientSpace::grid_sup(0.0, 1.0, 1e-3);
    Vector e1 = Vector::from_evaluator(grid, [](double x) { return 1.0 + x; });
    Vector e2 = Vector::from_evaluator(grid, [](double x) { return std::sin(3.0 * x); });
    Vector v = Vector::from_evaluator(grid, [](double x) { return x * x; });
    auto S = Subspace::span({e1, e2});

    const double d = distance_to_subspace(v, S).value;
    CHECK(d >= 0.0);
    CHECK(d <= norm(v) + 1e-12);

    // translation along the subspace
    Vector vs = linear_combination(1.0, v, 0.7, e1);
    CHECK(std::abs(distance_to_subspace(vs, S).value - d) < 1e-4);

    // scaling a basis vector leaves the span, hence the distance, unchanged
    auto S2 = Subspace::span({scaled(3.5, e1), e2});
    CHECK(std::abs(distance_to_subspace(v, S2).value - d) < 1e-4);
}

TEST_CASE("angle metric") {
    auto s = r2_sup();
    auto A = Subspace::span({vec2(s, 1.0, 0.0)});
    auto B = Subspace::span({vec2(s, 0.0, 1.0)});

    CHECK(angle(A, A) <= 1e-8);
    CHECK(std::abs(angle(A, B) - 1.0) < 1e-6);
    CHECK(angle(A, B) == angle(B, A));

    auto C = Subspace::span({vec2(s, 1.0, 0.2)});
    CHECK(angle(A, C) == angle(C, A));
    auto Cs = Subspace::span({vec2(s, 5.0, 1.0)});
    CHECK(std::abs(angle(A, C) - angle(A, Cs)) < 1e-6);
}

TEST_CASE("unit sphere sampling") {
    auto s = r2_sup();
    auto one_dim = Subspace::span({vec2(s, 2.0, 0.0)});
    auto pts = unit_sphere_samples(one_dim, 17);
    REQUIRE(pts.size() == 1);
    CHECK(std::abs(norm(pts[0]) - 1.0) < 1e-10);

    auto full = Subspace::span({vec2(s, 1.0, 0.0), vec2(s, 0.0, 1.0)});
    auto pts4 = unit_sphere_samples(full, 4);
    REQUIRE(pts4.size() == 4);
    for (const auto& p : pts4) CHECK(std::abs(norm(p) - 1.0) < 1e-10);
    // theta = pi/4 gives (1,1) after sup-norm normalization
    CHECK(std::abs(pts4[1].samples[0] - 1.0) < 1e-12);
    CHECK(std::abs(pts4[1].samples[1] - 1.0) < 1e-12);
}

TEST_CASE("deficiency monotone in sample count") {
    auto grid = AmbientSpace::grid_sup(0.0, 1.0, 1e-2);
    auto A = Subspace::span({Vector::from_evaluator(grid, [](double x) { return 1.0 + x; }),
                             Vector::from_evaluator(grid, [](double x) { return x * x; })});
    auto B = Subspace::span({Vector::from_evaluator(grid, [](double) { return 1.0; }),
                             Vector::from_evaluator(grid, [](double x) { return x; })});
    const double d90 = deficiency(A, B, 90);
    const double d180 = deficiency(A, B, 180);
    const double d360 = deficiency(A, B, 360);
    CHECK(d90 <= d180 + 1e-12);
    CHECK(d180 <= d360 + 1e-12);
    CHECK(std::abs(angle(A, B, 360) - angle(A, B, 180)) < 1e-3);
}

TEST_CASE("degenerate and unsupported cases") {
    auto s = r2_sup();
    CHECK_THROWS_AS(Subspace::span({vec2(s, 1.0, 1.0), vec2(s, 2.0, 2.0)}),
                    DegenerateBasisError);

    auto l2 = AmbientSpace::seq_l2(4);
    auto S3 = Subspace::span({Vector::from_samples(l2, {1, 0, 0, 0}),
                              Vector::from_samples(l2, {0, 1, 0, 0}),
                              Vector::from_samples(l2, {0, 0, 1, 0})});
    CHECK_THROWS_AS(unit_sphere_samples(S3, 8), UnsupportedDimensionError);
}
