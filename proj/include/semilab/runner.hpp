#pragma once

// Scenario registry and batch execution behind the command-line tool.
// Every run writes the same artifact set (decay.csv, angles.csv, series.csv,
// invariance.json, growth.csv) from a deterministic diagnostic bundle.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semilab/diagnostics.hpp"
#include "semilab/report.hpp"
#include "semilab/semigroup.hpp"

namespace semilab {

struct RunConfig {
    std::string scenario;
    // Negative values select the scenario's documented default.
    double t_max = -1.0;
    double t_step = -1.0;
    double s_max = -1.0;
    double s_step = -1.0;
    double grid_step = -1.0;
    double domain_max = -1.0;
    long k_max = -1;
    double decay_threshold = 1e-3;
    std::string out_dir;
    std::string format = "csv";
    bool plot = false;
};

struct RunArtifacts {
    CsvTable decay{{"t", "norm"}, {}};
    CsvTable angles{{"T", "s", "angle", "sup_profile"}, {}};
    CsvTable series{{"k", "term", "partial_sum"}, {}};
    CsvTable growth{{"t", "ratio"}, {}};
    nlohmann::json invariance;
    bool passed = false;
};

namespace detail {

inline double pick(double configured, double fallback) {
    return configured > 0.0 ? configured : fallback;
}

inline std::vector<double> arange(double lo, double hi, double step) {
    std::vector<double> out;
    for (long i = 0;; ++i) {
        const double t = lo + static_cast<double>(i) * step;
        if (t > hi + 1e-9 * (1.0 + std::abs(hi))) break;
        out.push_back(t);
    }
    return out;
}

inline Vector bump_vector(const SpacePtr& space, std::vector<double> fin = {}) {
    auto f = [](double x) { return std::max(0.0, 1.0 - std::abs(x - 5.0)); };
    return Vector::from_evaluator(space, f, std::move(fin));
}

inline void fill_decay(RunArtifacts& art, const DecayCurve& curve) {
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        art.decay.rows.push_back({curve.times[i], curve.norms[i]});
    art.invariance["decay_verdict"] = to_string(curve.verdict);
}

inline void fill_angles(RunArtifacts& art, const AngleTrajectory& traj) {
    for (std::size_t i = 0; i < traj.t_grid.size(); ++i)
        for (std::size_t j = 0; j < traj.s_grid.size(); ++j)
            art.angles.rows.push_back(
                {traj.t_grid[i], traj.s_grid[j], traj.angles[i][j], traj.sup_profile[i]});
}

inline void fill_series(RunArtifacts& art, const SeriesLedger& ledger) {
    for (std::size_t i = 0; i < ledger.terms.size(); ++i)
        art.series.rows.push_back(
            {static_cast<double>(i + 1), ledger.terms[i], ledger.partial_sums[i]});
}

inline void fill_growth(RunArtifacts& art,
                        const std::vector<std::pair<double, double>>& profile) {
    for (const auto& [t, ratio] : profile) art.growth.rows.push_back({t, ratio});
}

/// Collects named residuals with tolerances into invariance.json and folds
/// them into the run's pass flag.
struct ResidualSink {
    nlohmann::json* target;
    bool passed = true;
    void add(const std::string& name, double value, double tolerance) {
        (*target)["residuals"][name] = value;
        (*target)["tolerances"][name] = tolerance;
        passed = passed && value <= tolerance;
    }
    void note(const std::string& name, double value) { (*target)["values"][name] = value; }
};

inline void add_report(ResidualSink& sink, const std::string& prefix,
                       const InvarianceReport& report) {
    for (const auto& [name, value] : report.residuals)
        sink.add(prefix + name, value, report.tolerances.at(name));
}

inline double law_residual_sweep(const SemigroupScenario& sem, const Vector& v) {
    double worst = 0.0;
    const bool discrete = sem.time_domain == TimeDomain::Discrete;
    const std::vector<double> ts =
        discrete ? std::vector<double>{1.0, 2.0, 3.0} : std::vector<double>{0.1, 0.7, 1.0, 2.5};
    for (double t : ts)
        for (double q : ts) worst = std::max(worst, semigroup_law_residual(sem, v, t, q));
    return worst;
}

// ---------------------------------------------------------------------------
// Per-scenario bundles.

inline RunArtifacts bundle_ex1(const RunConfig& cfg) {
    RunArtifacts art;
    ResidualSink sink{&art.invariance};
    const std::size_t trunc = 64;
    auto sem = shift_double_discrete(trunc);
    const double t_max = pick(cfg.t_max, 16.0);

    std::vector<double> e3(trunc, 0.0);
    e3[2] = 1.0;
    Vector probe = Vector::from_samples(sem.space, std::move(e3));
    fill_decay(art, orbit_decay(sem, probe, arange(0.0, t_max, 1.0), cfg.decay_threshold));

    std::vector<double> geo(trunc, 0.0);
    for (std::size_t j = 0; j < trunc; ++j) geo[j] = std::ldexp(1.0, -static_cast<int>(j + 1));
    Vector x_geo = Vector::from_samples(sem.space, std::move(geo));
    auto y = Subspace::span({x_geo});

    fill_angles(art, angle_trajectory(sem, y, arange(0.0, 8.0, 1.0), {1.0}));
    const long k_max = cfg.k_max > 0 ? std::min(cfg.k_max, 16L) : 16L;
    fill_series(art, cauchy_series(sem, y, static_cast<std::size_t>(k_max)));
    fill_growth(art, growth_profile(sem, {x_geo}, arange(0.0, t_max, 1.0)));

    sink.add("law_residual", law_residual_sweep(sem, x_geo), 1e-8);
    add_report(sink, "geometric_line_", invariance_residual(sem, y, {1.0, 2.0, 4.0}));
    art.passed = sink.passed;
    return art;
}

inline RunArtifacts bundle_ex2(const RunConfig& cfg) {
    RunArtifacts art;
    ResidualSink sink{&art.invariance};
    auto sem = multiplication_semigroup(pick(cfg.grid_step, 1e-4));
    const double t_max = pick(cfg.t_max, 20.0);
    const double t_step = pick(cfg.t_step, 0.5);

    Vector probe = Vector::from_evaluator(sem.space, [](double x) { return 1.0 - x; });
    fill_decay(art, orbit_decay(sem, probe, arange(0.0, t_max, t_step), cfg.decay_threshold));

    Vector one = Vector::from_evaluator(sem.space, [](double) { return 1.0; });
    auto y = Subspace::span({one});
    fill_angles(art, angle_trajectory(sem, y, arange(0.0, t_max, std::max(t_step, 1.0)),
                                      arange(pick(cfg.s_step, 0.25), pick(cfg.s_max, 1.0),
                                             pick(cfg.s_step, 0.25))));
    const long k_max = cfg.k_max > 0 ? cfg.k_max : 1000L;
    fill_series(art, cauchy_series(sem, y, static_cast<std::size_t>(k_max)));
    fill_growth(art, growth_profile(sem, {one}, arange(0.0, t_max, t_step)));

    sink.add("law_residual", law_residual_sweep(sem, one), 1e-8);
    sink.note("m_functional_one", m_functional(sem, one, 10.0, {}, 256));
    art.passed = sink.passed;
    return art;
}

inline RunArtifacts bundle_ex3(const RunConfig& cfg) {
    RunArtifacts art;
    ResidualSink sink{&art.invariance};
    auto sem = translation_limit_semigroup(pick(cfg.domain_max, 400.0),
                                           pick(cfg.grid_step, 0.02));
    const double t_max = pick(cfg.t_max, 100.0);
    const double t_step = pick(cfg.t_step, 5.0);
    constexpr double pi = 3.14159265358979323846;

    Vector probe = Vector::from_evaluator(
        sem.space, [](double x) { return std::max(0.0, 1.0 - std::abs(x - 5.0)); }, {}, 0.0);
    fill_decay(art, orbit_decay(sem, probe, arange(0.0, std::min(t_max, 20.0), 1.0),
                                cfg.decay_threshold));

    Vector featured = Vector::from_evaluator(
        sem.space,
        [pi](double x) { return 1.0 + (x == 0.0 ? pi : std::sin(pi * x) / x); }, {}, 1.0);
    auto y = Subspace::span({featured});
    fill_angles(art, angle_trajectory(sem, y, arange(0.0, t_max, t_step),
                                      arange(pick(cfg.s_step, 0.25), pick(cfg.s_max, 1.0),
                                             pick(cfg.s_step, 0.25))));
    const long k_max = cfg.k_max > 0 ? cfg.k_max : 200L;
    fill_series(art, cauchy_series(sem, y, static_cast<std::size_t>(k_max)));
    fill_growth(art, growth_profile(sem, {featured}, arange(0.0, t_max, t_step)));

    sink.add("law_residual", law_residual_sweep(sem, featured), 1e-8);
    add_report(sink, "constants_", invariance_residual(sem, *sem.known_invariant,
                                                       {1.0, 2.5, 10.0}));
    art.passed = sink.passed;
    return art;
}

inline RunArtifacts bundle_ex4(const RunConfig& cfg) {
    RunArtifacts art;
    ResidualSink sink{&art.invariance};
    auto sem = example4_semigroup(pick(cfg.domain_max, 60.0), pick(cfg.grid_step, 0.05));
    const double t_max = pick(cfg.t_max, 27.0);
    const double t_step = pick(cfg.t_step, 0.25);
    DiagnosticsOptions opts;
    opts.sphere_samples = 96;

    Vector probe = bump_vector(sem.space, {0.0, 0.0});
    fill_decay(art, orbit_decay(sem, probe, arange(0.0, std::min(t_max, 20.0), 1.0),
                                cfg.decay_threshold));

    Vector ey = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {1.0, 0.0});
    Vector ez = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {0.0, 1.0});
    auto y = Subspace::span({ey, ez});
    const double t_lo = t_max >= 21.0 ? 20.0 : 0.0;
    fill_angles(art, angle_trajectory(sem, y, arange(t_lo, t_max, t_step),
                                      {pick(cfg.s_max, 1.0)}, opts));
    const long k_max = cfg.k_max > 0 ? std::min(cfg.k_max, 60L) : 30L;
    fill_series(art, cauchy_series(sem, y, static_cast<std::size_t>(k_max)));
    fill_growth(art, growth_profile(sem, {ey, ez}, arange(0.0, t_max, 1.0)));

    sink.add("law_residual", law_residual_sweep(sem, Vector::from_evaluator(
                                                         sem.space,
                                                         [](double x) { return std::exp(-x); },
                                                         {0.3, -0.7})),
             1e-8);
    add_report(sink, "y_inf_",
               invariance_residual(sem, example4_invariant_subspace(sem.space),
                                   {0.5, 1.0, 2.0}, opts));
    constexpr double half_pi = 1.57079632679489661923;
    auto g = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
    auto k_fn = [](double x) { return half_pi - si(x); };
    auto l_fn = [](double x) { return x * (half_pi - si(x)) - std::cos(x); };
    auto k_prime = [g](double x) { return -g(x); };
    auto l_prime = [k_fn](double x) { return k_fn(x); };
    add_report(sink, "generator_",
               generator_conditions_check(g, k_fn, l_fn, arange(0.0, 60.0, 0.5),
                                          DerivativeMode::ClosedForm, k_prime, l_prime));
    art.passed = sink.passed;
    return art;
}

inline RunArtifacts bundle_ex5(const RunConfig& cfg) {
    RunArtifacts art;
    ResidualSink sink{&art.invariance};
    auto sem = example5_semigroup(pick(cfg.domain_max, 400.0), pick(cfg.grid_step, 0.02));
    const double t_max = pick(cfg.t_max, 1000.0);

    Vector probe = bump_vector(sem.space, {0.0});
    fill_decay(art, orbit_decay(sem, probe, arange(0.0, 20.0, 1.0), cfg.decay_threshold));

    Vector ey = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {1.0});
    auto y = Subspace::span({ey});
    fill_angles(art, angle_trajectory(sem, y, {10.0, 50.0, 100.0}, {pick(cfg.s_max, 1.0)}));
    const long k_max = cfg.k_max > 0 ? cfg.k_max : 100L;
    fill_series(art, cauchy_series(sem, y, static_cast<std::size_t>(k_max)));
    fill_growth(art, growth_profile(sem, {ey}, arange(0.0, t_max, std::max(1.0, t_max / 20.0))));

    sink.add("law_residual", law_residual_sweep(sem, ey), 1e-8);
    const Vector at1 = apply(sem, ey, 1.0);
    sink.add("log_closed_form_err", std::abs(at1.eval(0.0) - std::log(2.0)), 1e-10);
    for (double t : {10.0, 100.0}) {
        const double model = 1.0 / (1.0 + std::log(1.0 + t));
        const double measured = x0_deficiency(sem, evolved_subspace(sem, y, t));
        sink.add("x0_angle_t" + std::to_string(static_cast<int>(t)) + "_err",
                 std::abs(measured - model), 0.1 * model);
        sink.note("x0_angle_t" + std::to_string(static_cast<int>(t)), measured);
    }
    art.passed = sink.passed;
    return art;
}

inline RunArtifacts bundle_remark2(const RunConfig& cfg) {
    RunArtifacts art;
    ResidualSink sink{&art.invariance};
    auto sem = remark2_jordan_semigroup();
    const double t_max = pick(cfg.t_max, 20.0);
    const double t_step = pick(cfg.t_step, 1.0);

    Vector v = Vector::from_samples(sem.space, {1.0, -0.1});
    fill_decay(art, orbit_decay(sem, v, arange(0.0, t_max, t_step), cfg.decay_threshold));

    Vector ez = Vector::from_samples(sem.space, {0.0, 1.0});
    auto y = Subspace::span({ez});
    fill_angles(art, angle_trajectory(sem, y, arange(0.0, t_max, t_step), {1.0}));
    const long k_max = cfg.k_max > 0 ? cfg.k_max : 50L;
    fill_series(art, cauchy_series(sem, y, static_cast<std::size_t>(k_max)));
    fill_growth(art, growth_profile(sem, {ez}, arange(0.0, t_max, t_step)));

    sink.add("law_residual", law_residual_sweep(sem, v), 1e-8);
    const double m10 = m_functional(sem, Vector::from_samples(sem.space, {1.0, 0.0}), 1000.0);
    const double m1e = m_functional(sem, v, 1000.0);
    sink.add("m_1_0_err", std::abs(m10 - 1.0), 1e-6);
    sink.add("m_1_-0.1_err", std::abs(m1e - 0.1), 1e-6);
    sink.note("m_1_0", m10);
    sink.note("m_1_-0.1", m1e);
    art.passed = sink.passed;
    return art;
}

inline RunArtifacts bundle_duhamel(const RunConfig& cfg) {
    RunArtifacts art;
    ResidualSink sink{&art.invariance};
    const double x_max = pick(cfg.domain_max, 40.0);
    const double step = pick(cfg.grid_step, 0.02);

    SemigroupScenario alpha;
    alpha.name = "translation-core";
    alpha.space = AmbientSpace::grid_sup(0.0, x_max, step);
    alpha.growth_class = GrowthClass::Bounded;
    alpha.x0_description = "all of the core (translations vanish at infinity)";
    alpha.evolve = [](const Vector& v, double t) -> Vector {
        if (t == 0.0) return v;
        const Vector f = v;
        return Vector::from_evaluator(v.space, [f, t](double x) { return f.eval(x + t); });
    };

    TriangularSpec spec;
    spec.alpha = alpha;
    spec.q_dim = 1;
    spec.q_apply = [](const std::vector<double>& b, double) { return b; };
    spec.p_columns = {Vector::from_evaluator(alpha.space,
                                             [](double x) { return 1.0 / (x + 1.0); })};
    auto sem = duhamel_extension(spec);
    auto closed = example5_semigroup(x_max, step);

    Vector probe = bump_vector(sem.space, {0.0});
    fill_decay(art, orbit_decay(sem, probe, arange(0.0, 10.0, 1.0), cfg.decay_threshold));

    Vector ey = Vector::from_evaluator(sem.space, [](double) { return 0.0; }, {1.0});
    auto y = Subspace::span({ey});
    fill_angles(art, angle_trajectory(sem, y, {1.0, 2.0, 4.0}, {1.0}));
    const long k_max = cfg.k_max > 0 ? std::min(cfg.k_max, 20L) : 10L;
    fill_series(art, cauchy_series(sem, y, static_cast<std::size_t>(k_max)));
    fill_growth(art, growth_profile(sem, {ey}, arange(0.0, 10.0, 1.0)));

    Vector ey_closed = Vector::from_evaluator(closed.space, [](double) { return 0.0; }, {1.0});
    double max_diff = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
        const Vector a = apply(sem, ey, t);
        const Vector b = apply(closed, ey_closed, t);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            diff = std::max(diff, std::abs(a.samples[i] - b.samples[i]));
        max_diff = std::max(max_diff, diff);
    }
    sink.add("max_diff_vs_closed_form", max_diff, 1e-5);
    sink.add("law_residual", semigroup_law_residual(sem, ey, 1.0, 1.0), 1e-5);

    // Order check: halving quad_step must shrink the disagreement by >= 4x.
    auto diff_at = [&](double quad_step) {
        TriangularSpec s2 = spec;
        s2.quad_step = quad_step;
        auto replica = duhamel_extension(s2);
        const Vector a = apply(replica, ey, 1.0);
        const Vector b = apply(closed, ey_closed, 1.0);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            diff = std::max(diff, std::abs(a.samples[i] - b.samples[i]));
        return diff;
    };
    const double coarse = diff_at(0.05), fine = diff_at(0.025);
    sink.note("order_ratio", coarse / fine);
    sink.add("order_ratio_deficit", std::max(0.0, 4.0 - coarse / fine), 0.0);
    art.passed = sink.passed;
    return art;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Registry.

struct ScenarioEntry {
    std::string name;
    std::string description;
    std::function<RunArtifacts(const RunConfig&)> bundle;
};

inline const std::vector<ScenarioEntry>& scenario_registry() {
    static const std::vector<ScenarioEntry> entries = {
        {"ex1-shift-double",
         "discrete doubling shift (2x2, 2x3, ...) on truncated l2; dense non-closed X0",
         detail::bundle_ex1},
        {"ex2-multiplication",
         "bounded multiplication semigroup x^t f(x) on C[0,1]; divergent Cauchy series",
         detail::bundle_ex2},
        {"ex3-translation-limit",
         "translations of functions with a limit at infinity; stabilizes to constants",
         detail::bundle_ex3},
        {"ex4-nonstabilizable",
         "linear-growth coupling via sin(x)/x on C0(R+) x R^2; 0 x R^2 never stabilizes",
         detail::bundle_ex4},
        {"ex5-log-growth",
         "slow coupling via 1/(x+1) on C0(R+) x R; operator norm grows like ln t",
         detail::bundle_ex5},
        {"remark2-jordan",
         "planar Jordan flow (y+tz, z); the m-functional is discontinuous at (1,0)",
         detail::bundle_remark2},
        {"duhamel-vs-closed-form",
         "quadrature-built triangular extension checked against its closed form",
         detail::bundle_duhamel},
    };
    return entries;
}

inline const ScenarioEntry* find_scenario(const std::string& name) {
    for (const auto& entry : scenario_registry())
        if (entry.name == name) return &entry;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Config file: flat key=value lines; '#' starts a comment.

inline void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;
        if (key == "scenario") cfg.scenario = value;
        else if (key == "t_max") cfg.t_max = std::stod(value);
        else if (key == "t_step") cfg.t_step = std::stod(value);
        else if (key == "s_max") cfg.s_max = std::stod(value);
        else if (key == "s_step") cfg.s_step = std::stod(value);
        else if (key == "grid_step") cfg.grid_step = std::stod(value);
        else if (key == "domain_max") cfg.domain_max = std::stod(value);
        else if (key == "k_max") cfg.k_max = std::stol(value);
        else if (key == "decay_threshold") cfg.decay_threshold = std::stod(value);
        else if (key == "out") cfg.out_dir = value;
        else if (key == "format") cfg.format = value;
        else if (key == "plot") cfg.plot = value == "true" || value == "1";
        else throw Error("unknown config key: " + key);
    }
}

// ---------------------------------------------------------------------------
// Execution. Exit codes: 0 all thresholds passed, 2 unknown scenario,
// 3 numerical failure, 4 I/O failure.

inline int run(RunConfig cfg, std::ostream& out, std::ostream& err) {
    const ScenarioEntry* entry = find_scenario(cfg.scenario);
    if (!entry) {
        err << "unknown scenario '" << cfg.scenario << "'; registered scenarios:\n";
        for (const auto& e : scenario_registry()) err << "  " << e.name << '\n';
        return 2;
    }
    if (cfg.out_dir.empty()) {
        const char* env = std::getenv("SEMILAB_OUT");
        cfg.out_dir = env && *env ? env : ".";
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        err << "format must be csv or json\n";
        return 2;
    }
    for (double step : {cfg.t_step, cfg.s_step, cfg.grid_step})
        if (step == 0.0) {
            err << "steps must be positive\n";
            return 2;
        }
    if (cfg.t_max > 0.0 && cfg.t_step > 0.0 && cfg.t_max < cfg.t_step) {
        err << "t_max must be at least t_step\n";
        return 2;
    }

    RunArtifacts art;
    try {
        art = entry->bundle(cfg);
    } catch (const IoError& e) {
        err << "i/o failure: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        err << "numerical failure in scenario '" << cfg.scenario << "': " << e.what() << '\n';
        return 3;
    }

    try {
        const std::filesystem::path dir(cfg.out_dir);
        std::filesystem::create_directories(dir);
        write_csv(dir / "decay.csv", art.decay);
        write_csv(dir / "angles.csv", art.angles);
        write_csv(dir / "series.csv", art.series);
        write_csv(dir / "growth.csv", art.growth);
        art.invariance["scenario"] = cfg.scenario;
        art.invariance["passed"] = art.passed;
        write_json(dir / "invariance.json", art.invariance);
        if (cfg.format == "json") {
            nlohmann::json combined;
            combined["scenario"] = cfg.scenario;
            combined["decay"] = csv_to_json(art.decay);
            combined["angles"] = csv_to_json(art.angles);
            combined["series"] = csv_to_json(art.series);
            combined["growth"] = csv_to_json(art.growth);
            combined["invariance"] = art.invariance;
            write_json(dir / "report.json", combined);
        }
        if (cfg.plot) {
            write_svg_chart(dir / "decay.csv", dir / "decay.svg", 0, 1);
            write_svg_chart(dir / "angles.csv", dir / "angles.svg", 0, 3);
            write_svg_chart(dir / "series.csv", dir / "series.svg", 0, 2);
            write_svg_chart(dir / "growth.csv", dir / "growth.svg", 0, 1);
        }
    } catch (const std::exception& e) {
        err << "i/o failure: " << e.what() << '\n';
        return 4;
    }

    out << cfg.scenario << ": " << (art.passed ? "all thresholds passed" : "threshold failures")
        << "; artifacts in " << cfg.out_dir << '\n';
    return art.passed ? 0 : 1;
}

inline void list_scenarios(std::ostream& out) {
    for (const auto& e : scenario_registry())
        out << e.name << "\n    " << e.description << '\n';
}

} // namespace semilab
