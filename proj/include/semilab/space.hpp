#pragma once

// Discretized normed spaces, vectors, finite-dimensional subspaces, the
// minimax distance-to-subspace solver and the angle metric built on it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semilab/errors.hpp"

namespace semilab {

enum class SpaceKind {
    GridSup,          // sup norm over a uniform grid on [x_min, x_max]
    GridSupWithLimit, // sup norm including |limit at infinity|
    SeqL2Truncated,   // Euclidean norm on the first trunc_len coordinates
    ProductSum        // ||(x0, y)|| = ||x0||_core + |y|_inf
};

struct AmbientSpace;
using SpacePtr = std::shared_ptr<const AmbientSpace>;

struct AmbientSpace {
    SpaceKind kind = SpaceKind::GridSup;
    double x_min = 0.0;
    double x_max = 0.0;
    double step = 0.0;
    std::size_t trunc_len = 0;
    SpacePtr core;
    std::size_t fin_dim = 0;

    bool is_grid() const {
        return kind == SpaceKind::GridSup || kind == SpaceKind::GridSupWithLimit;
    }

    /// Number of stored sample slots (grid points or sequence coordinates).
    std::size_t sample_count() const {
        switch (kind) {
        case SpaceKind::GridSup:
        case SpaceKind::GridSupWithLimit: {
            const double n = (x_max - x_min) / step;
            return static_cast<std::size_t>(std::llround(n)) + 1;
        }
        case SpaceKind::SeqL2Truncated:
            return trunc_len;
        case SpaceKind::ProductSum:
            return core->sample_count();
        }
        return 0;
    }

    double grid_point(std::size_t i) const {
        const AmbientSpace& g = kind == SpaceKind::ProductSum ? *core : *this;
        return g.x_min + static_cast<double>(i) * g.step;
    }

    static SpacePtr grid_sup(double x_min, double x_max, double step) {
        return make_grid(SpaceKind::GridSup, x_min, x_max, step);
    }

    static SpacePtr grid_sup_with_limit(double x_min, double x_max, double step) {
        return make_grid(SpaceKind::GridSupWithLimit, x_min, x_max, step);
    }

    static SpacePtr seq_l2(std::size_t trunc_len) {
        if (trunc_len == 0)
            throw Error("seq-l2-truncated space needs trunc_len > 0");
        AmbientSpace s;
        s.kind = SpaceKind::SeqL2Truncated;
        s.trunc_len = trunc_len;
        return std::make_shared<const AmbientSpace>(std::move(s));
    }

    static SpacePtr product_sum(SpacePtr core, std::size_t fin_dim) {
        if (!core || core->kind == SpaceKind::ProductSum)
            throw Error("product-sum core must be a non-product space");
        AmbientSpace s;
        s.kind = SpaceKind::ProductSum;
        s.core = std::move(core);
        s.fin_dim = fin_dim;
        return std::make_shared<const AmbientSpace>(std::move(s));
    }

private:
    static SpacePtr make_grid(SpaceKind kind, double x_min, double x_max, double step) {
        if (!(step > 0.0) || !(x_max > x_min))
            throw Error("grid space needs x_max > x_min and step > 0");
        const double n = (x_max - x_min) / step;
        const double rounded = std::round(n);
        if (rounded < 1.0)
            throw Error("grid space needs at least 2 points");
        if (std::abs(n - rounded) > 1e-12 * std::max(1.0, std::abs(n)))
            throw Error("grid step does not divide (x_max - x_min)");
        AmbientSpace s;
        s.kind = kind;
        s.x_min = x_min;
        s.x_max = x_max;
        s.step = step;
        return std::make_shared<const AmbientSpace>(std::move(s));
    }
};

inline bool same_space(const AmbientSpace& a, const AmbientSpace& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case SpaceKind::GridSup:
    case SpaceKind::GridSupWithLimit:
        return a.x_min == b.x_min && a.x_max == b.x_max && a.step == b.step;
    case SpaceKind::SeqL2Truncated:
        return a.trunc_len == b.trunc_len;
    case SpaceKind::ProductSum:
        return a.fin_dim == b.fin_dim && same_space(*a.core, *b.core);
    }
    return false;
}

using Evaluator = std::function<double(double)>;

/// Element of an ambient space. Grid samples are always materialized; the
/// closed-form evaluator, when present, is kept for reads beyond the grid
/// (translation semigroups) and for exact re-evolution.
struct Vector {
    SpacePtr space;
    std::vector<double> samples;
    Evaluator evaluator;
    std::optional<double> limit_at_inf;
    std::vector<double> fin_part;

    static Vector from_samples(SpacePtr space, std::vector<double> samples,
                               std::vector<double> fin_part = {},
                               std::optional<double> limit = std::nullopt) {
        Vector v;
        v.space = std::move(space);
        v.samples = std::move(samples);
        v.fin_part = std::move(fin_part);
        v.limit_at_inf = limit;
        v.validate();
        return v;
    }

    static Vector from_evaluator(SpacePtr space, Evaluator eval,
                                 std::vector<double> fin_part = {},
                                 std::optional<double> limit = std::nullopt) {
        Vector v;
        v.space = std::move(space);
        v.evaluator = std::move(eval);
        v.fin_part = std::move(fin_part);
        v.limit_at_inf = limit;
        const std::size_t n = v.space->sample_count();
        v.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            v.samples[i] = v.evaluator(v.space->grid_point(i));
        v.validate();
        return v;
    }

    /// Both representations supplied; they must agree at grid points.
    static Vector from_both(SpacePtr space, std::vector<double> samples,
                            Evaluator eval, std::vector<double> fin_part = {},
                            std::optional<double> limit = std::nullopt) {
        Vector v = from_samples(std::move(space), std::move(samples),
                                std::move(fin_part), limit);
        for (std::size_t i = 0; i < v.samples.size(); ++i) {
            const double e = eval(v.space->grid_point(i));
            if (std::abs(e - v.samples[i]) > 1e-10)
                throw MalformedVectorError(
                    "samples and evaluator disagree at grid point " + std::to_string(i));
        }
        v.evaluator = std::move(eval);
        return v;
    }

    bool has_evaluator() const { return static_cast<bool>(evaluator); }

    /// Pointwise read; exact at grid points, closed form beyond the grid
    /// when an evaluator is available.
    double eval(double x) const {
        if (evaluator) return evaluator(x);
        const AmbientSpace& g = space->kind == SpaceKind::ProductSum ? *space->core : *space;
        if (!g.step)
            throw MalformedVectorError("pointwise read on a sequence-space vector");
        if (x < g.x_min - 1e-12 || x > g.x_max + 1e-12)
            throw MalformedVectorError("pointwise read beyond the grid without an evaluator");
        const double u = (x - g.x_min) / g.step;
        const std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(u))),
                                       samples.size() - 2);
        const double w = u - static_cast<double>(i);
        return samples[i] * (1.0 - w) + samples[i + 1] * w;
    }

    /// Reported (never hidden) gap between the last grid value and the
    /// declared limit at infinity.
    double limit_gap() const {
        if (!limit_at_inf) return 0.0;
        return std::abs(samples.back() - *limit_at_inf);
    }

    void validate() const {
        if (!space) throw MalformedVectorError("vector without an ambient space");
        if (samples.size() != space->sample_count())
            throw MalformedVectorError("sample count does not match the ambient space");
        const std::size_t want_fin =
            space->kind == SpaceKind::ProductSum ? space->fin_dim : 0;
        if (fin_part.size() != want_fin)
            throw MalformedVectorError("fin_part length does not match fin_dim");
        if (space->kind == SpaceKind::GridSupWithLimit && !limit_at_inf)
            throw MalformedVectorError("grid-sup-with-limit vector needs limit_at_inf");
    }
};

/// a*v + b*w. The evaluator is combined when both operands carry one.
inline Vector linear_combination(double a, const Vector& v, double b, const Vector& w) {
    if (!same_space(*v.space, *w.space))
        throw MalformedVectorError("linear combination across different spaces");
    Vector r;
    r.space = v.space;
    r.samples.resize(v.samples.size());
    for (std::size_t i = 0; i < r.samples.size(); ++i)
        r.samples[i] = a * v.samples[i] + b * w.samples[i];
    r.fin_part.resize(v.fin_part.size());
    for (std::size_t i = 0; i < r.fin_part.size(); ++i)
        r.fin_part[i] = a * v.fin_part[i] + b * w.fin_part[i];
    if (v.limit_at_inf || w.limit_at_inf)
        r.limit_at_inf = a * v.limit_at_inf.value_or(0.0) + b * w.limit_at_inf.value_or(0.0);
    if (v.evaluator && w.evaluator) {
        Evaluator ev = v.evaluator, ew = w.evaluator;
        r.evaluator = [a, b, ev, ew](double x) { return a * ev(x) + b * ew(x); };
    }
    return r;
}

inline Vector scaled(double a, const Vector& v) {
    Vector r;
    r.space = v.space;
    r.samples.resize(v.samples.size());
    for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] = a * v.samples[i];
    r.fin_part.resize(v.fin_part.size());
    for (std::size_t i = 0; i < r.fin_part.size(); ++i) r.fin_part[i] = a * v.fin_part[i];
    if (v.limit_at_inf) r.limit_at_inf = a * *v.limit_at_inf;
    if (v.evaluator) {
        Evaluator ev = v.evaluator;
        r.evaluator = [a, ev](double x) { return a * ev(x); };
    }
    return r;
}

inline Vector operator+(const Vector& v, const Vector& w) { return linear_combination(1.0, v, 1.0, w); }
inline Vector operator-(const Vector& v, const Vector& w) { return linear_combination(1.0, v, -1.0, w); }

/// Ambient norm of v (sup over grid including the limit for with-limit
/// spaces, Euclidean for sequences, core norm + max-abs fin for products).
inline double norm(const Vector& v) {
    v.validate();
    double core = 0.0;
    const SpaceKind core_kind =
        v.space->kind == SpaceKind::ProductSum ? v.space->core->kind : v.space->kind;
    if (core_kind == SpaceKind::SeqL2Truncated) {
        double s = 0.0;
        for (double x : v.samples) s += x * x;
        core = std::sqrt(s);
    } else {
        for (double x : v.samples) core = std::max(core, std::abs(x));
        if (v.limit_at_inf) core = std::max(core, std::abs(*v.limit_at_inf));
    }
    double fin = 0.0;
    for (double x : v.fin_part) fin = std::max(fin, std::abs(x));
    return core + fin;
}

inline Vector normalized(const Vector& v) {
    const double n = norm(v);
    if (n <= 1e-15) throw MalformedVectorError("cannot normalize a zero vector");
    return scaled(1.0 / n, v);
}

struct DistanceResult {
    double value = 0.0;
    std::vector<double> coefficients;
};

struct SolverOptions {
    double tol = 1e-6;   // relative tolerance on the minimax value
    int max_sweeps = 80; // direction-set sweeps before declaring failure
};

struct Subspace; // fwd

DistanceResult distance_to_subspace(const Vector& v, const Subspace& S,
                                    const SolverOptions& opts = {});

/// Ambient space plus a finite linearly independent basis.
struct Subspace {
    SpacePtr space;
    std::vector<Vector> basis;

    std::size_t dim() const { return basis.size(); }

    /// Builds a subspace, rejecting degenerate bases: each basis vector must
    /// stay at distance > 1e-8 * its norm from the span of the others.
    static Subspace span(std::vector<Vector> basis);
};

namespace detail {

// Objective ||v - sum_i beta_i e_i|| with all operands pre-sampled.
struct MinimaxObjective {
    const Vector* v = nullptr;
    std::array<const Vector*, 4> e{};
    std::size_t d = 0;
    bool l2 = false;
    bool with_limit = false;

    double operator()(const double* beta) const {
        const std::size_t m = v->samples.size();
        double core = 0.0;
        if (l2) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                double r = v->samples[j];
                for (std::size_t i = 0; i < d; ++i) r -= beta[i] * e[i]->samples[j];
                s += r * r;
            }
            core = std::sqrt(s);
        } else {
            switch (d) {
            case 1: {
                const double* a = v->samples.data();
                const double* b0 = e[0]->samples.data();
                const double b = beta[0];
                for (std::size_t j = 0; j < m; ++j)
                    core = std::max(core, std::abs(a[j] - b * b0[j]));
                break;
            }
            case 2: {
                const double* a = v->samples.data();
                const double* b0 = e[0]->samples.data();
                const double* b1 = e[1]->samples.data();
                const double c0 = beta[0], c1 = beta[1];
                for (std::size_t j = 0; j < m; ++j)
                    core = std::max(core, std::abs(a[j] - c0 * b0[j] - c1 * b1[j]));
                break;
            }
            default:
                for (std::size_t j = 0; j < m; ++j) {
                    double r = v->samples[j];
                    for (std::size_t i = 0; i < d; ++i) r -= beta[i] * e[i]->samples[j];
                    core = std::max(core, std::abs(r));
                }
            }
            if (with_limit) {
                double r = v->limit_at_inf.value_or(0.0);
                for (std::size_t i = 0; i < d; ++i)
                    r -= beta[i] * e[i]->limit_at_inf.value_or(0.0);
                core = std::max(core, std::abs(r));
            }
        }
        double fin = 0.0;
        for (std::size_t j = 0; j < v->fin_part.size(); ++j) {
            double r = v->fin_part[j];
            for (std::size_t i = 0; i < d; ++i) r -= beta[i] * e[i]->fin_part[j];
            fin = std::max(fin, std::abs(r));
        }
        return core + fin;
    }
};

// Least-squares seed over the concatenated sample/limit/fin coordinates.
inline std::vector<double> least_squares_seed(const MinimaxObjective& p) {
    const std::size_t d = p.d;
    std::array<std::array<double, 5>, 4> a{}; // augmented [G | rhs]
    auto accumulate = [&](auto get, std::size_t count) {
        for (std::size_t j = 0; j < count; ++j) {
            std::array<double, 5> row{};
            const double vj = get(*p.v, j);
            for (std::size_t i = 0; i < d; ++i) row[i] = get(*p.e[i], j);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t k = 0; k < d; ++k) a[i][k] += row[i] * row[k];
                a[i][4] += row[i] * vj;
            }
        }
    };
    accumulate([](const Vector& w, std::size_t j) { return w.samples[j]; },
               p.v->samples.size());
    accumulate([](const Vector& w, std::size_t j) { return w.fin_part[j]; },
               p.v->fin_part.size());
    if (p.with_limit)
        accumulate([](const Vector& w, std::size_t) { return w.limit_at_inf.value_or(0.0); }, 1);

    // Gaussian elimination with partial pivoting; singular Gram -> zero seed.
    std::vector<double> beta(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < d; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return std::vector<double>(d, 0.0);
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= 4; ++k) a[r][k] -= f * a[c][k];
        }
    }
    for (std::size_t i = 0; i < d; ++i) beta[i] = a[i][4] / a[i][i];
    return beta;
}

// Golden-section minimum of a convex 1-d function on [lo, hi].
template <class F>
inline std::pair<double, double> golden_min(F&& f, double lo, double hi, double tol_x) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol_x) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

inline MinimaxObjective make_objective(const Vector& v, const Subspace& S) {
    if (!same_space(*v.space, *S.space))
        throw MalformedVectorError("vector and subspace live in different spaces");
    MinimaxObjective p;
    p.v = &v;
    p.d = S.dim();
    for (std::size_t i = 0; i < p.d; ++i) p.e[i] = &S.basis[i];
    const SpaceKind core_kind =
        v.space->kind == SpaceKind::ProductSum ? v.space->core->kind : v.space->kind;
    p.l2 = core_kind == SpaceKind::SeqL2Truncated && v.space->kind != SpaceKind::ProductSum;
    // Product cores are grid kinds in this artifact; an l2 core would need
    // a split objective, which no scenario uses.
    p.with_limit = !p.l2;
    return p;
}

} // namespace detail

/// Minimax distance from v to span(S): min over beta of ||v - sum beta_i e_i||.
/// Convex piecewise-linear in beta; solved by direction-set descent with
/// golden-section line searches from a least-squares seed.
inline DistanceResult distance_to_subspace(const Vector& v, const Subspace& S,
                                           const SolverOptions& opts) {
    const std::size_t d = S.dim();
    if (d == 0 || d > 4)
        throw UnsupportedDimensionError("distance_to_subspace supports 1 <= dim <= 4");
    detail::MinimaxObjective obj = detail::make_objective(v, S);

    std::vector<double> beta = detail::least_squares_seed(obj);
    double best = obj(beta.data());

    // Direction set: coordinates plus all pairwise diagonals (handles the
    // ridges of the piecewise-linear objective in up to 4 variables).
    std::vector<std::array<double, 4>> dirs;
    for (std::size_t i = 0; i < d; ++i) {
        std::array<double, 4> u{};
        u[i] = 1.0;
        dirs.push_back(u);
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            std::array<double, 4> u{};
            u[i] = 1.0; u[j] = 1.0;
            dirs.push_back(u);
            u[j] = -1.0;
            dirs.push_back(u);
        }

    double beta_mag = 0.0;
    for (double b : beta) beta_mag = std::max(beta_mag, std::abs(b));
    const double radius = 2.0 * (1.0 + beta_mag + best);
    const double tol_x = std::max(opts.tol * 1e-2, 1e-11);
    const double tol_f = opts.tol;
    const std::vector<double> zeros(d, 0.0);
    const double abs_eps = 1e-11 * (1.0 + obj(zeros.data()));

    bool converged = false;
    std::vector<double> trial(d);
    std::array<double, 4> u_net{};
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const double before = best;
        const std::vector<double> beta_start = beta;
        auto search = [&](const std::array<double, 4>& u) {
            auto line = [&](double s) {
                for (std::size_t i = 0; i < d; ++i) trial[i] = beta[i] + s * u[i];
                return obj(trial.data());
            };
            auto [s_min, f_min] = detail::golden_min(line, -radius, radius, tol_x);
            if (f_min < best) {
                best = f_min;
                for (std::size_t i = 0; i < d; ++i) beta[i] += s_min * u[i];
            }
        };
        for (const auto& u : dirs) search(u);
        // Powell-style extension: the net displacement of the sweep tracks
        // ridges that no fixed direction aligns with.
        double net_mag = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            u_net[i] = beta[i] - beta_start[i];
            net_mag = std::max(net_mag, std::abs(u_net[i]));
        }
        if (net_mag > 0.0) {
            for (std::size_t i = 0; i < d; ++i) u_net[i] /= net_mag;
            search(u_net);
        }
        if (before - best <= tol_f * best + abs_eps) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw SolverFailureError("minimax descent did not converge", best);
    return DistanceResult{best, beta};
}

inline Subspace Subspace::span(std::vector<Vector> basis) {
    if (basis.empty()) throw Error("subspace needs a nonempty basis");
    Subspace s;
    s.space = basis.front().space;
    for (const Vector& b : basis) {
        b.validate();
        if (!same_space(*b.space, *s.space))
            throw MalformedVectorError("basis vectors live in different spaces");
    }
    s.basis = std::move(basis);
    for (std::size_t i = 0; i < s.basis.size(); ++i) {
        const double ni = norm(s.basis[i]);
        if (s.basis.size() == 1) {
            if (ni <= 1e-15)
                throw DegenerateBasisError("zero basis vector", 0.0);
            continue;
        }
        Subspace others;
        others.space = s.space;
        for (std::size_t j = 0; j < s.basis.size(); ++j)
            if (j != i) others.basis.push_back(s.basis[j]);
        const double dist = distance_to_subspace(s.basis[i], others).value;
        if (dist <= 1e-8 * ni)
            throw DegenerateBasisError("basis is not linearly independent", 0.0);
    }
    return s;
}

namespace detail {

/// Unit-sphere directions of S together with their coordinates in the basis.
/// Angles uniform on [0, pi); doubling M nests the sample set.
inline std::vector<std::pair<std::array<double, 2>, Vector>>
unit_sphere_with_coefficients(const Subspace& S, std::size_t M) {
    std::vector<std::pair<std::array<double, 2>, Vector>> out;
    if (S.dim() == 1) {
        const double n = norm(S.basis[0]);
        out.push_back({{1.0 / n, 0.0}, scaled(1.0 / n, S.basis[0])});
        return out;
    }
    if (S.dim() != 2)
        throw UnsupportedDimensionError("unit-sphere sampling supports dim <= 2");
    constexpr double pi = 3.14159265358979323846;
    for (std::size_t j = 0; j < M; ++j) {
        const double theta = pi * static_cast<double>(j) / static_cast<double>(M);
        const double c = std::cos(theta), s = std::sin(theta);
        Vector w = linear_combination(c, S.basis[0], s, S.basis[1]);
        const double n = norm(w);
        out.push_back({{c / n, s / n}, scaled(1.0 / n, w)});
    }
    return out;
}

} // namespace detail

/// Normalized sphere samples of S (the single unit basis vector for dim 1,
/// M angular samples for dim 2; antipodes are not duplicated).
inline std::vector<Vector> unit_sphere_samples(const Subspace& S, std::size_t M) {
    std::vector<Vector> out;
    for (auto& [coeff, w] : detail::unit_sphere_with_coefficients(S, M))
        out.push_back(std::move(w));
    return out;
}

/// One-sided deficiency sup_{a in A, |a|=1} dist(a, B), the sup sampled over
/// M sphere directions of A. Exact for dim(A) = 1.
inline double deficiency(const Subspace& A, const Subspace& B, std::size_t M,
                         const SolverOptions& opts = {}) {
    if (!same_space(*A.space, *B.space))
        throw MalformedVectorError("deficiency across different ambient spaces");
    double worst = 0.0;
    for (const Vector& a : unit_sphere_samples(A, M))
        worst = std::max(worst, distance_to_subspace(a, B, opts).value);
    return worst;
}

/// Gap angle: min of the two one-sided deficiencies. Symmetric by
/// construction; a metric on equal-dimension subspaces.
inline double angle(const Subspace& A, const Subspace& B, std::size_t M = 720,
                    const SolverOptions& opts = {}) {
    return std::min(deficiency(A, B, M, opts), deficiency(B, A, M, opts));
}

} // namespace semilab
