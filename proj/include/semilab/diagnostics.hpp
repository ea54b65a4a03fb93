#pragma once

// Measurements over scenarios: decay witnesses, the m-functional,
// angle trajectories, Cauchy series, limit-subspace estimates, coefficient
// bounds, growth profiles and invariance checks.
//
// Every "-> 0" claim is witnessed on a finite horizon with a documented
// threshold; verdicts never assert limits beyond their window.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "semilab/errors.hpp"
#include "semilab/semigroup.hpp"
#include "semilab/space.hpp"

namespace semilab {

struct DiagnosticsOptions {
    std::size_t sphere_samples = 720;
    SolverOptions solver;
};

// ---------------------------------------------------------------------------
// Result records.

enum class DecayVerdict { Decaying, NonDecaying, Inconclusive };

inline const char* to_string(DecayVerdict v) {
    switch (v) {
    case DecayVerdict::Decaying: return "decaying";
    case DecayVerdict::NonDecaying: return "non-decaying";
    case DecayVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> norms;
    DecayVerdict verdict = DecayVerdict::Inconclusive;
    double threshold = 0.0;
    double window_lo = 0.0; // T_half
    double window_hi = 0.0; // T_max
};

struct AngleTrajectory {
    std::vector<double> t_grid;
    std::vector<double> s_grid;
    std::vector<std::vector<double>> angles; // angles[i][j] = angle(Y_Ti, Y_Ti+sj)
    std::vector<double> sup_profile;         // row max
};

struct SeriesLedger {
    std::size_t k_max = 0;
    std::vector<double> terms;        // index k-1 holds the k -> k+1 term
    std::vector<double> partial_sums; // prefix sums of terms
};

struct InvarianceReport {
    enum class Kind { Trajectory, Generator } kind = Kind::Trajectory;
    std::map<std::string, double> residuals;
    std::map<std::string, double> tolerances;
    bool passed = false;
};

// ---------------------------------------------------------------------------
// Orbit decay (X0 membership witness).

inline DecayCurve orbit_decay(const SemigroupScenario& sem, const Vector& v,
                              const std::vector<double>& t_grid, double threshold) {
    if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()))
        throw Error("orbit_decay needs a nonempty increasing t_grid");
    DecayCurve curve;
    curve.times = t_grid;
    curve.threshold = threshold;
    curve.window_hi = t_grid.back();
    curve.window_lo = t_grid.front() + 0.5 * (t_grid.back() - t_grid.front());
    double window_max = 0.0, window_min = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double n = norm(apply(sem, v, t));
        curve.norms.push_back(n);
        if (t >= curve.window_lo) {
            window_max = std::max(window_max, n);
            window_min = std::min(window_min, n);
        }
    }
    if (window_max <= threshold)
        curve.verdict = DecayVerdict::Decaying;
    else if (window_min > threshold)
        curve.verdict = DecayVerdict::NonDecaying;
    else
        curve.verdict = DecayVerdict::Inconclusive;
    return curve;
}

// ---------------------------------------------------------------------------
// m-functional: m(v) = inf_t dist(v_t, X0).

inline double m_functional(const SemigroupScenario& sem, const Vector& v, double t_max,
                           std::function<double(const Vector&)> x0_distance = {},
                           std::size_t grid_steps = 2048) {
    if (!x0_distance) x0_distance = sem.x0_distance;
    if (!x0_distance)
        throw UnsupportedScenarioError(
            "m_functional needs a closed-form X0 distance for this scenario");
    auto dist_at = [&](double t) { return x0_distance(apply(sem, v, t)); };

    if (sem.time_domain == TimeDomain::Discrete) {
        double best = dist_at(0.0);
        for (double n = 1.0; n <= t_max; n += 1.0) best = std::min(best, dist_at(n));
        return best;
    }

    const double h = t_max / static_cast<double>(grid_steps);
    double best = dist_at(0.0);
    double best_t = 0.0;
    for (std::size_t i = 1; i <= grid_steps; ++i) {
        const double t = static_cast<double>(i) * h;
        const double d = dist_at(t);
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    // Golden refinement around the best grid point.
    const double lo = std::max(0.0, best_t - h), hi = std::min(t_max, best_t + h);
    auto [t_min, d_min] = detail::golden_min(dist_at, lo, hi, 1e-9 * (1.0 + t_max));
    (void)t_min;
    return std::min(best, d_min);
}

// ---------------------------------------------------------------------------
// Evolved subspaces.

/// Y_T: each basis vector evolved to time T and re-normalized (spans, hence
/// angles, are unchanged; conditioning is not).
inline Subspace evolved_subspace(const SemigroupScenario& sem, const Subspace& y,
                                 double t, bool renormalize = true) {
    std::vector<Vector> basis;
    for (const Vector& e : y.basis) {
        Vector e_t = apply(sem, e, t);
        basis.push_back(renormalize ? normalized(e_t) : std::move(e_t));
    }
    try {
        return Subspace::span(std::move(basis));
    } catch (const DegenerateBasisError& e) {
        throw DegenerateBasisError(std::string(e.what()) + " (evolved basis)", t);
    }
}

inline AngleTrajectory angle_trajectory(const SemigroupScenario& sem, const Subspace& y,
                                        const std::vector<double>& t_grid,
                                        const std::vector<double>& s_grid,
                                        const DiagnosticsOptions& opts = {}) {
    if (y.dim() > 2)
        throw UnsupportedDimensionError("angle_trajectory supports dim <= 2");
    AngleTrajectory traj;
    traj.t_grid = t_grid;
    traj.s_grid = s_grid;
    for (double t : t_grid) {
        const Subspace y_t = evolved_subspace(sem, y, t);
        std::vector<double> row;
        double sup = 0.0;
        for (double s : s_grid) {
            const Subspace y_ts = evolved_subspace(sem, y, t + s);
            const double a = angle(y_t, y_ts, opts.sphere_samples, opts.solver);
            row.push_back(a);
            sup = std::max(sup, a);
        }
        traj.angles.push_back(std::move(row));
        traj.sup_profile.push_back(sup);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Cauchy series of one-step displacements.
//
// Term k is the sign-aligned displacement max_i || ±e^i_{k+1} - e^i_k || of
// the normalized evolved basis, the quantity the divergence computations
// sum (an upper bound for the gap angle between consecutive positions).

inline SeriesLedger cauchy_series(const SemigroupScenario& sem, const Subspace& y,
                                  std::size_t k_max) {
    SeriesLedger ledger;
    ledger.k_max = k_max;
    std::vector<Vector> prev;
    for (const Vector& e : y.basis) prev.push_back(normalized(apply(sem, e, 1.0)));
    double sum = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        std::vector<Vector> next;
        for (const Vector& e : y.basis)
            next.push_back(normalized(apply(sem, e, static_cast<double>(k + 1))));
        double term = 0.0;
        for (std::size_t i = 0; i < prev.size(); ++i) {
            const double d_minus = norm(next[i] - prev[i]);
            const double d_plus = norm(next[i] + prev[i]);
            term = std::max(term, std::min(d_minus, d_plus));
        }
        ledger.terms.push_back(term);
        sum += term;
        ledger.partial_sums.push_back(sum);
        prev = std::move(next);
    }
    return ledger;
}

// ---------------------------------------------------------------------------
// Limit-subspace estimate (observable side of stabilization).

inline std::pair<Subspace, double>
estimate_limit_subspace(const SemigroupScenario& sem, const Subspace& y, double t_probe,
                        const DiagnosticsOptions& opts = {}) {
    if (y.dim() > 2)
        throw UnsupportedDimensionError("estimate_limit_subspace supports dim <= 2");
    Subspace estimate = evolved_subspace(sem, y, t_probe);
    const Subspace half = evolved_subspace(sem, y, 0.5 * t_probe);
    const double gap = angle(estimate, half, opts.sphere_samples, opts.solver);
    return {std::move(estimate), gap};
}

// ---------------------------------------------------------------------------
// Coefficient bound (the constant k of the basis-coefficient estimate).

inline double coefficient_bound_probe(const SemigroupScenario& sem, const Subspace& y,
                                      const std::vector<double>& t_grid,
                                      const DiagnosticsOptions& opts = {}) {
    if (y.dim() > 2)
        throw UnsupportedDimensionError("coefficient_bound_probe supports dim <= 2");
    double worst = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const Subspace y_t = evolved_subspace(sem, y, t, /*renormalize=*/false);
        for (const auto& [beta, unit] :
             detail::unit_sphere_with_coefficients(y_t, opts.sphere_samples)) {
            (void)unit;
            const double coeff_sum = std::abs(beta[0]) + std::abs(beta[1]);
            if (coeff_sum > 0.0) worst = std::min(worst, 1.0 / coeff_sum);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Growth profile: empirical lower envelope of ||phi_t||.

inline std::vector<std::pair<double, double>>
growth_profile(const SemigroupScenario& sem, const std::vector<Vector>& probes,
               const std::vector<double>& t_grid) {
    std::vector<double> probe_norms;
    for (const Vector& p : probes) {
        const double n = norm(p);
        if (n <= 1e-15) throw Error("growth_profile probes must be nonzero");
        probe_norms.push_back(n);
    }
    std::vector<std::pair<double, double>> profile;
    for (double t : t_grid) {
        double ratio = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i)
            ratio = std::max(ratio, norm(apply(sem, probes[i], t)) / probe_norms[i]);
        profile.emplace_back(t, ratio);
    }
    return profile;
}

// ---------------------------------------------------------------------------
// Generator-based invariance (the k' = -g, l' = k conditions).

enum class DerivativeMode { ClosedForm, FiniteDiff };

inline InvarianceReport generator_conditions_check(
    const Evaluator& g, const Evaluator& k, const Evaluator& l,
    const std::vector<double>& grid, DerivativeMode mode,
    Evaluator k_prime = {}, Evaluator l_prime = {}, double h = 1e-4) {
    if (mode == DerivativeMode::ClosedForm && (!k_prime || !l_prime))
        throw Error("closed-form mode needs k_prime and l_prime");
    auto diff = [&](const Evaluator& f, double x) { return (f(x + h) - f(x)) / h; };
    double res_k = 0.0, res_l = 0.0;
    for (double x : grid) {
        const double kp = mode == DerivativeMode::ClosedForm ? k_prime(x) : diff(k, x);
        const double lp = mode == DerivativeMode::ClosedForm ? l_prime(x) : diff(l, x);
        res_k = std::max(res_k, std::abs(kp + g(x)));
        res_l = std::max(res_l, std::abs(lp - k(x)));
    }
    InvarianceReport report;
    report.kind = InvarianceReport::Kind::Generator;
    const double tol = mode == DerivativeMode::ClosedForm ? 1e-8 : 1e-4;
    report.residuals = {{"k_prime_plus_g", res_k}, {"l_prime_minus_k", res_l}};
    report.tolerances = {{"k_prime_plus_g", tol}, {"l_prime_minus_k", tol}};
    report.passed = res_k <= tol && res_l <= tol;
    return report;
}

// ---------------------------------------------------------------------------
// Trajectory-level invariance: max_t angle(S, S_t).

inline InvarianceReport invariance_residual(const SemigroupScenario& sem, const Subspace& s,
                                            const std::vector<double>& t_grid,
                                            const DiagnosticsOptions& opts = {}) {
    if (s.dim() > 2)
        throw UnsupportedDimensionError("invariance_residual supports dim <= 2");
    InvarianceReport report;
    report.kind = InvarianceReport::Kind::Trajectory;
    double worst = 0.0;
    for (double t : t_grid) {
        const Subspace s_t = evolved_subspace(sem, s, t);
        const double a = angle(s, s_t, opts.sphere_samples, opts.solver);
        worst = std::max(worst, a);
    }
    report.residuals = {{"max_angle", worst}};
    report.tolerances = {{"max_angle", 1e-3}};
    report.passed = worst <= 1e-3;
    return report;
}

// ---------------------------------------------------------------------------
// One-sided deficiency against X0 through the scenario's closed form
// (X0 is never materialized as a Subspace).

inline double x0_deficiency(const SemigroupScenario& sem, const Subspace& s,
                            const DiagnosticsOptions& opts = {}) {
    if (!sem.x0_distance)
        throw UnsupportedScenarioError("scenario has no closed-form X0 distance");
    double worst = 0.0;
    for (const Vector& u : unit_sphere_samples(s, opts.sphere_samples))
        worst = std::max(worst, sem.x0_distance(u));
    return worst;
}

} // namespace semilab
