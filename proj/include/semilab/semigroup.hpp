#pragma once

// Semigroup scenarios: the evolution-law abstraction, the concrete example
// semigroups, and the triangular variation-of-constants (Duhamel) extension.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semilab/errors.hpp"
#include "semilab/space.hpp"
#include "semilab/specialfn.hpp"

namespace semilab {

enum class TimeDomain { Continuous, Discrete };

enum class GrowthClass { Bounded, Slow, Linear, UnboundedExponential };

inline const char* to_string(GrowthClass g) {
    switch (g) {
    case GrowthClass::Bounded: return "bounded";
    case GrowthClass::Slow: return "slow";
    case GrowthClass::Linear: return "linear";
    case GrowthClass::UnboundedExponential: return "unbounded-exponential";
    }
    return "?";
}

/// A named evolution law v -> phi_t(v). growth_class is declared metadata,
/// spot-verified by diagnostics, never inferred. x0_distance, when present,
/// is the scenario's closed-form distance to X0 = {v | v_t -> 0}.
struct SemigroupScenario {
    std::string name;
    TimeDomain time_domain = TimeDomain::Continuous;
    SpacePtr space;
    std::function<Vector(const Vector&, double)> evolve;
    GrowthClass growth_class = GrowthClass::Bounded;
    std::optional<Subspace> known_invariant;
    std::string x0_description;
    std::function<double(const Vector&)> x0_distance;
};

inline Vector apply(const SemigroupScenario& sem, const Vector& v, double t) {
    if (t < 0.0)
        throw TimeDomainError("semigroup time must be non-negative");
    if (sem.time_domain == TimeDomain::Discrete && t != std::floor(t))
        throw TimeDomainError("discrete semigroup needs integer time");
    if (!same_space(*v.space, *sem.space))
        throw MalformedVectorError("vector does not live in the scenario's space");
    return sem.evolve(v, t);
}

inline double semigroup_law_residual(const SemigroupScenario& sem, const Vector& v,
                                     double t, double q) {
    return norm(apply(sem, apply(sem, v, t), q) - apply(sem, v, t + q));
}

/// The Jordan-block flow (y, z) -> (y + t z, z).
inline std::array<double, 2> jordan_block_q(std::array<double, 2> yz, double t) {
    return {yz[0] + t * yz[1], yz[1]};
}

// ---------------------------------------------------------------------------
// Small dense matrix exponential (n <= 3), scaling and squaring.

using Matrix = std::vector<std::vector<double>>;

namespace detail {

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                c[i][j] += a[i][k] * b[k][j];
    return c;
}

} // namespace detail

/// exp(tA) for n <= 3 via scaling and squaring with a 14-term Taylor series.
inline Matrix matrix_exp(const Matrix& a, double t) {
    const std::size_t n = a.size();
    if (n == 0 || n > 3) throw Error("matrix_exp supports 1 <= n <= 3");
    double amax = 0.0;
    for (const auto& row : a)
        for (double x : row) amax = std::max(amax, std::abs(t * x));
    int s = 0;
    while (amax > 0.5) {
        amax *= 0.5;
        ++s;
    }
    const double scale = t / std::ldexp(1.0, s);
    Matrix b(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b[i][j] = scale * a[i][j];
    Matrix result(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) result[i][i] = 1.0;
    Matrix term = result;
    for (int k = 1; k <= 14; ++k) {
        term = detail::mat_mul(term, b);
        for (auto& row : term)
            for (double& x : row) x /= static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
    }
    for (int k = 0; k < s; ++k) result = detail::mat_mul(result, result);
    return result;
}

/// Finite-dimensional exponential semigroup Q_t = exp(tA) on R^n, n <= 3.
inline SemigroupScenario matrix_semigroup(Matrix a) {
    const std::size_t n = a.size();
    if (n == 0 || n > 3) throw Error("matrix_semigroup supports 1 <= n <= 3");
    SemigroupScenario sem;
    sem.name = "matrix-exponential";
    sem.space = AmbientSpace::seq_l2(n);
    sem.growth_class = GrowthClass::UnboundedExponential;
    sem.x0_description = "depends on the spectrum of A";
    sem.evolve = [a, n](const Vector& v, double t) {
        const Matrix m = matrix_exp(a, t);
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i] += m[i][j] * v.samples[j];
        return Vector::from_samples(v.space, std::move(out));
    };
    return sem;
}

// ---------------------------------------------------------------------------
// Concrete scenarios.

/// (phi_t f)(x) = x^t f(x) on C[0,1]; X0 = {f | f(1) = 0}, codim 1, bounded.
inline SemigroupScenario multiplication_semigroup(double step = 1e-4) {
    SemigroupScenario sem;
    sem.name = "ex2-multiplication";
    sem.space = AmbientSpace::grid_sup(0.0, 1.0, step);
    sem.growth_class = GrowthClass::Bounded;
    sem.x0_description = "f in C[0,1] with f(1) = 0";
    sem.x0_distance = [](const Vector& v) { return std::abs(v.samples.back()); };
    sem.evolve = [](const Vector& v, double t) -> Vector {
        if (t == 0.0) return v;
        const Vector f = v;
        return Vector::from_evaluator(
            v.space, [f, t](double x) { return std::pow(x, t) * f.eval(x); });
    };
    return sem;
}

/// Translation (phi_t f)(x) = f(x + t) on functions with a limit at infinity;
/// X0 = functions tending to zero, constants are invariant.
inline SemigroupScenario translation_limit_semigroup(double x_max = 400.0,
                                                     double step = 0.02) {
    SemigroupScenario sem;
    sem.name = "ex3-translation-limit";
    sem.space = AmbientSpace::grid_sup_with_limit(0.0, x_max, step);
    sem.growth_class = GrowthClass::Bounded;
    sem.x0_description = "functions with limit 0 at infinity";
    sem.x0_distance = [](const Vector& v) { return std::abs(v.limit_at_inf.value_or(0.0)); };
    sem.known_invariant = Subspace::span({Vector::from_evaluator(
        sem.space, [](double) { return 1.0; }, {}, 1.0)});
    sem.evolve = [](const Vector& v, double t) -> Vector {
        if (t == 0.0) return v;
        const Vector f = v;
        return Vector::from_evaluator(
            v.space, [f, t](double x) { return f.eval(x + t); }, {}, v.limit_at_inf);
    };
    return sem;
}

/// Discrete unbounded semigroup T(x1, x2, ...) = (2 x2, 2 x3, ...) on l2,
/// truncated to trunc_len coordinates. Valid step horizon: n <= trunc_len/2.
inline SemigroupScenario shift_double_discrete(std::size_t trunc_len) {
    if (trunc_len < 8) throw Error("shift_double_discrete needs trunc_len >= 8");
    SemigroupScenario sem;
    sem.name = "ex1-shift-double";
    sem.time_domain = TimeDomain::Discrete;
    sem.space = AmbientSpace::seq_l2(trunc_len);
    sem.growth_class = GrowthClass::UnboundedExponential;
    sem.x0_description = "contains all finite sequences; dense but not closed";
    sem.evolve = [trunc_len](const Vector& v, double t) {
        std::vector<double> cur = v.samples;
        const std::size_t steps =
            std::min(static_cast<std::size_t>(t), trunc_len);
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t j = 0; j + 1 < trunc_len; ++j) cur[j] = 2.0 * cur[j + 1];
            cur[trunc_len - 1] = 0.0;
        }
        return Vector::from_samples(v.space, std::move(cur));
    };
    return sem;
}

/// The unbounded planar flow phi_t(y, z) = (y + t z, z) on R^2; X0 = {0}.
inline SemigroupScenario remark2_jordan_semigroup() {
    SemigroupScenario sem;
    sem.name = "remark2-jordan";
    sem.space = AmbientSpace::seq_l2(2);
    sem.growth_class = GrowthClass::Linear;
    sem.x0_description = "X0 = {0}; m is discontinuous at (1,0)";
    sem.x0_distance = [](const Vector& v) { return norm(v); };
    sem.evolve = [](const Vector& v, double t) {
        const auto out = jordan_block_q({v.samples[0], v.samples[1]}, t);
        return Vector::from_samples(v.space, {out[0], out[1]});
    };
    return sem;
}

/// Linear-growth semigroup on C0(R+) x R^2 driven by g(x) = sin(x)/x; the
/// coupling integral is assembled from Si and cos in closed form.
inline SemigroupScenario example4_semigroup(double x_max = 400.0, double step = 0.02) {
    SemigroupScenario sem;
    sem.name = "ex4-nonstabilizable";
    sem.space = AmbientSpace::product_sum(AmbientSpace::grid_sup(0.0, x_max, step), 2);
    sem.growth_class = GrowthClass::Linear;
    sem.x0_description = "C0(R+) x {0}; complement 0 x R^2 is not almost stabilizable";
    sem.x0_distance = [](const Vector& v) {
        return std::max(std::abs(v.fin_part[0]), std::abs(v.fin_part[1]));
    };
    sem.evolve = [](const Vector& v, double t) -> Vector {
        if (t == 0.0) return v;
        const Vector f = v;
        const double y = v.fin_part[0], z = v.fin_part[1];
        const double a = y + t * z;
        auto eval = [f, t, a, z](double x) {
            const double d_si = si(x + t) - si(x);
            return f.eval(x + t) + a * d_si +
                   z * (std::cos(x + t) - std::cos(x) + x * d_si);
        };
        return Vector::from_evaluator(v.space, eval, {a, z});
    };
    return sem;
}

/// Fixed points of the example-4 generator: Y_inf = span{(k,1,0), (l,0,1)}
/// with k(x) = pi/2 - Si(x) and l(x) = x(pi/2 - Si(x)) - cos(x).
inline Subspace example4_invariant_subspace(const SpacePtr& space) {
    constexpr double half_pi = 1.57079632679489661923;
    Vector u = Vector::from_evaluator(
        space, [](double x) { return half_pi - si(x); }, {1.0, 0.0});
    Vector w = Vector::from_evaluator(
        space, [](double x) { return x * (half_pi - si(x)) - std::cos(x); }, {0.0, 1.0});
    return Subspace::span({u, w});
}

/// Slow-growth semigroup on C0(R+) x R with g(x) = 1/(x+1);
/// phi_t(0, 1) has core part ln((x+1+t)/(x+1)), so ||phi_t|| ~ ln t = o(t).
inline SemigroupScenario example5_semigroup(double x_max = 400.0, double step = 0.02) {
    SemigroupScenario sem;
    sem.name = "ex5-log-growth";
    sem.space = AmbientSpace::product_sum(AmbientSpace::grid_sup(0.0, x_max, step), 1);
    sem.growth_class = GrowthClass::Slow;
    sem.x0_description = "C0(R+) x {0}";
    sem.x0_distance = [](const Vector& v) { return std::abs(v.fin_part[0]); };
    sem.evolve = [](const Vector& v, double t) -> Vector {
        if (t == 0.0) return v;
        const Vector f = v;
        const double y = v.fin_part[0];
        auto eval = [f, t, y](double x) {
            return f.eval(x + t) + y * (std::log(x + 1.0 + t) - std::log(x + 1.0));
        };
        return Vector::from_evaluator(v.space, eval, {y});
    };
    return sem;
}

// ---------------------------------------------------------------------------
// Triangular Duhamel extension.

using CoordFlow = std::function<std::vector<double>(const std::vector<double>&, double)>;

/// Generator data for the triangular semigroup on core x R^n:
/// phi_t(x, b) = (alpha_t x + int_0^t alpha_s P Q_{t-s} b ds, Q_t b),
/// with P(b) = sum_i b_i g_i given by p_columns.
struct TriangularSpec {
    SemigroupScenario alpha;
    std::size_t q_dim = 1;
    CoordFlow q_apply;
    std::vector<Vector> p_columns;
    double quad_step = 0.0; // <= 0 selects 1e-3 * t clamped to [1e-4, 0.01]
    double quad_tol = 1e-5; // Richardson threshold for quadrature failure
};

namespace detail {

inline double duhamel_step(const TriangularSpec& spec, double t) {
    if (spec.quad_step > 0.0) return spec.quad_step;
    return std::clamp(1e-3 * t, 1e-4, 0.01);
}

} // namespace detail

/// Builds the triangular semigroup of a TriangularSpec with composite
/// Simpson quadrature for the coupling block (Richardson-checked: the
/// returned values come from the once-halved step).
inline SemigroupScenario duhamel_extension(TriangularSpec spec) {
    if (spec.q_dim == 0 || spec.q_dim > 3)
        throw Error("duhamel_extension supports 1 <= q_dim <= 3");
    if (spec.p_columns.size() != spec.q_dim)
        throw Error("p_columns must have q_dim entries");
    for (const Vector& g : spec.p_columns)
        if (!same_space(*g.space, *spec.alpha.space))
            throw MalformedVectorError("p_columns must lie in the core space");

    SemigroupScenario sem;
    sem.name = "duhamel-" + spec.alpha.name;
    sem.time_domain = spec.alpha.time_domain;
    sem.space = AmbientSpace::product_sum(spec.alpha.space, spec.q_dim);
    sem.growth_class = GrowthClass::Slow;
    sem.x0_description = "core x {0} under the triangular representation";
    sem.x0_distance = [](const Vector& v) {
        double fin = 0.0;
        for (double x : v.fin_part) fin = std::max(fin, std::abs(x));
        return fin;
    };

    auto shared_spec = std::make_shared<const TriangularSpec>(std::move(spec));
    SpacePtr product_space = sem.space;

    sem.evolve = [shared_spec, product_space](const Vector& v, double t) -> Vector {
        const TriangularSpec& sp = *shared_spec;
        const std::size_t n = sp.q_dim;
        const std::vector<double> b(v.fin_part.begin(), v.fin_part.end());
        std::vector<double> b_t = sp.q_apply(b, t);

        Vector core_in = Vector::from_samples(sp.alpha.space, v.samples, {}, v.limit_at_inf);
        if (v.evaluator) core_in.evaluator = v.evaluator;
        Vector base = apply(sp.alpha, core_in, t);

        bool b_zero = true;
        for (double x : b) b_zero = b_zero && x == 0.0;
        if (t == 0.0 || b_zero) {
            Vector out;
            out.space = product_space;
            out.samples = base.samples;
            out.fin_part = std::move(b_t);
            out.limit_at_inf = base.limit_at_inf;
            out.evaluator = base.evaluator;
            out.validate();
            return out;
        }

        const double h_req = detail::duhamel_step(sp, t);
        std::size_t m = static_cast<std::size_t>(std::ceil(t / h_req));
        if (m % 2) ++m;
        if (m < 2) m = 2;

        // One composite Simpson pass over s in [0, t] with m subintervals.
        // keep_evaluators also collects the per-node closures for the result;
        // returns false when some node lacks a closed form.
        auto integrate = [&](std::size_t subdiv, bool keep_evaluators,
                             std::vector<double>& acc, double& acc_limit,
                             std::vector<std::pair<double, Evaluator>>& nodes) {
            const double h = t / static_cast<double>(subdiv);
            acc.assign(base.samples.size(), 0.0);
            acc_limit = 0.0;
            bool all_closed_form = true;
            for (std::size_t i = 0; i <= subdiv; ++i) {
                const double s = static_cast<double>(i) * h;
                double w = (i == 0 || i == subdiv) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                w *= h / 3.0;
                const std::vector<double> c = sp.q_apply(b, t - s);
                std::optional<Vector> pv;
                for (std::size_t j = 0; j < n; ++j) {
                    if (c[j] == 0.0) continue;
                    if (!pv)
                        pv = scaled(c[j], sp.p_columns[j]);
                    else
                        pv = linear_combination(1.0, *pv, c[j], sp.p_columns[j]);
                }
                if (!pv) continue;
                Vector node = apply(sp.alpha, *pv, s);
                for (std::size_t k = 0; k < acc.size(); ++k)
                    acc[k] += w * node.samples[k];
                acc_limit += w * node.limit_at_inf.value_or(0.0);
                if (keep_evaluators) {
                    if (node.evaluator)
                        nodes.emplace_back(w, node.evaluator);
                    else
                        all_closed_form = false;
                }
            }
            return all_closed_form;
        };

        std::vector<double> coarse, fine;
        double coarse_limit = 0.0, fine_limit = 0.0;
        std::vector<std::pair<double, Evaluator>> nodes;
        std::vector<std::pair<double, Evaluator>> unused;
        integrate(m, false, coarse, coarse_limit, unused);
        const bool nodes_complete = integrate(2 * m, true, fine, fine_limit, nodes);

        double richardson = std::abs(fine_limit - coarse_limit) / 15.0;
        for (std::size_t k = 0; k < fine.size(); ++k)
            richardson = std::max(richardson, std::abs(fine[k] - coarse[k]) / 15.0);
        if (richardson > sp.quad_tol)
            throw QuadratureFailureError("Duhamel quadrature did not converge");

        Vector out;
        out.space = product_space;
        out.samples = base.samples;
        for (std::size_t k = 0; k < out.samples.size(); ++k) out.samples[k] += fine[k];
        out.fin_part = std::move(b_t);
        if (base.limit_at_inf) out.limit_at_inf = *base.limit_at_inf + fine_limit;
        if (base.evaluator && nodes_complete) {
            Evaluator base_eval = base.evaluator;
            auto node_list = std::make_shared<const std::vector<std::pair<double, Evaluator>>>(
                std::move(nodes));
            out.evaluator = [base_eval, node_list](double x) {
                double r = base_eval(x);
                for (const auto& [w, ev] : *node_list) r += w * ev(x);
                return r;
            };
        }
        out.validate();
        return out;
    };
    return sem;
}

} // namespace semilab
