#include "latfront/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include "latfront/backprop.hpp"
#include "latfront/csv.hpp"
#include "latfront/dispersion.hpp"
#include "latfront/envelopes.hpp"
#include "latfront/errors.hpp"
#include "latfront/front_analysis.hpp"
#include "latfront/manifest.hpp"

namespace latfront {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

MediaModel media_with_seed(const Config& cfg, std::uint64_t seed) {
    MediaModel m = cfg.media;
    m.seed = seed;
    return m;
}

std::uint64_t primary_seed(const Config& cfg, const RunOptions& opt) {
    return opt.seed_override ? *opt.seed_override : cfg.seeds.front();
}

std::vector<std::uint64_t> seed_set(const Config& cfg, const RunOptions& opt) {
    if (opt.seed_override) return {*opt.seed_override};
    return cfg.seeds;
}

void export_media(const MediaPath& path, RunManifest& man) {
    CsvWriter csv(man.dir() / "media.csv", {"t", "a"});
    for (std::size_t i = 0; i < path.node_count(); ++i)
        csv.row({path.node_time(i), path.node_value(i)});
    man.add_output("media.csv");
}

void write_json(RunManifest& man, const std::string& name, const json& j) {
    std::ofstream out(man.dir() / name);
    out << j.dump(2) << "\n";
    out.close();
    man.add_output(name);
}

json wave_json(const ResolvedWave& w) {
    return {{"a_bar", w.a_bar}, {"mu", w.mu},     {"gamma", w.gamma},
            {"mu_star", w.mu_star}, {"c0", w.c0}, {"from_gamma", w.from_gamma}};
}

void run_parallel(std::size_t njobs, int threads,
                  const std::function<void(std::size_t)>& job) {
    if (threads <= 1 || njobs <= 1) {
        for (std::size_t k = 0; k < njobs; ++k) job(k);
        return;
    }
    std::vector<std::exception_ptr> errors(njobs);
    std::mutex mx;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(njobs));
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t k;
                {
                    std::lock_guard<std::mutex> lock(mx);
                    if (next >= njobs) return;
                    k = next++;
                }
                try {
                    job(k);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

// ---------------------------------------------------------------------------
// speedscan
// ---------------------------------------------------------------------------

int cmd_speedscan(const Config& cfg, const RunOptions& opt) {
    RunManifest man(opt.outdir, "speedscan", cfg.raw);
    man.add_seed(primary_seed(cfg, opt));
    man.write_initial();

    const MediaPath path = build_media(media_with_seed(cfg, primary_seed(cfg, opt)));
    const double a_bar = resolve_a_lower(path, cfg.analysis.least_mean_r);
    const DispersionResult disp = minimize_envelope(a_bar);

    {
        CsvWriter csv(man.dir() / "envelope.csv", {"mu", "c_envelope"});
        const double lo = std::log(cfg.speedscan.mu_lo), hi = std::log(cfg.speedscan.mu_hi);
        for (int k = 0; k < cfg.speedscan.points; ++k) {
            const double mu = std::exp(lo + (hi - lo) * k / (cfg.speedscan.points - 1));
            csv.row({mu, envelope_speed(mu, a_bar)});
        }
        man.add_output("envelope.csv");
    }

    json summary;
    summary["a_bar"] = a_bar;
    summary["mu_star"] = disp.mu_star;
    summary["c0"] = disp.c0;
    summary["stationarity_residual"] = disp.residual;
    auto roots_json = json::array();
    for (double gamma : cfg.speedscan.gammas) {
        json entry{{"gamma", gamma}};
        try {
            const SpeedRoots roots = speed_roots(gamma, a_bar);
            entry["ok"] = true;
            entry["degenerate"] = roots.degenerate;
            entry["mu_small"] = roots.mu_small;
            entry["mu_large"] = roots.mu_large;
        } catch (const std::domain_error& e) {
            // partial-failure contract: flag the entry, keep processing
            entry["ok"] = false;
            entry["reason"] = e.what();
        }
        roots_json.push_back(entry);
    }
    summary["roots"] = roots_json;
    write_json(man, "summary.json", summary);

    export_media(path, man);
    write_csv_schema(man.dir(), {{"envelope.csv", {"mu", "c_envelope"}}, {"media.csv", {"t", "a"}}});
    man.add_output("schema.json");
    man.finalize();
    return 0;
}

// ---------------------------------------------------------------------------
// envelope
// ---------------------------------------------------------------------------

int cmd_envelope(const Config& cfg, const RunOptions& opt) {
    RunManifest man(opt.outdir, "envelope", cfg.raw);
    const auto seed = primary_seed(cfg, opt);
    man.add_seed(seed);
    man.write_initial();

    const MediaPath path = build_media(media_with_seed(cfg, seed));
    const ResolvedWave wave = resolve_wave(cfg.wave, path, cfg.analysis.least_mean_r);
    man.set_resolved(wave_json(wave));
    const EnvelopePair env = make_envelope(path, wave.mu, wave.mu_star, wave.a_bar);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    {
        CsvWriter csv(man.dir() / "envelope_field.csv",
                      {"x", "t", "super", "sub", "residual_super", "residual_sub"});
        for (double t : cfg.envelope.times) {
            const double disp = env.upper.displacement(t);
            for (double y = cfg.envelope.y_lo; y <= cfg.envelope.y_hi + 1e-12;
                 y += cfg.envelope.dy) {
                const double x = disp + y;
                const double rs = residual_super(env.upper, x, t, cfg.envelope.fd_step);
                // the sub-solution inequality only applies right of the crest
                const double rb = x >= env.lower.crest(t)
                                      ? residual_sub(env.lower, x, t, cfg.envelope.fd_step)
                                      : nan;
                csv.row({x, t, env.upper(x, t), env.lower(x, t), rs, rb});
            }
        }
        man.add_output("envelope_field.csv");
    }
    write_json(man, "summary.json",
               {{"mu", wave.mu},
                {"mu_tilde", env.lower.mu_tilde()},
                {"delta", env.lower.corrector().delta},
                {"threshold_K", env.lower.corrector().threshold},
                {"d", env.lower.amplitude()},
                {"corrector_sup_norm", env.lower.corrector().sup_norm},
                {"corrector_truncation_error", env.lower.corrector().truncation_error}});

    export_media(path, man);
    write_csv_schema(man.dir(),
                     {{"envelope_field.csv",
                       {"x", "t", "super", "sub", "residual_super", "residual_sub"}},
                      {"media.csv", {"t", "a"}}});
    man.add_output("schema.json");
    man.finalize();
    return 0;
}

// ---------------------------------------------------------------------------
// front
// ---------------------------------------------------------------------------

namespace {

BackPropConfig backprop_config(const Config& cfg, int threads) {
    BackPropConfig bp;
    bp.tau_ladder = cfg.front.tau_ladder;
    bp.eval_times = cfg.front.eval_times;
    bp.y_lo = cfg.front.y_lo;
    bp.y_hi = cfg.front.y_hi;
    bp.dy = cfg.front.dy;
    bp.m = cfg.sim.m;
    bp.width = cfg.sim.width;
    bp.pad_behind = cfg.front.pad_behind;
    bp.pad_ahead = cfg.front.pad_ahead;
    bp.sim = cfg.sim.to_sim_config(cfg.analysis.lambda);
    bp.sim.moving_window = false;
    bp.threads = threads;
    return bp;
}

}  // namespace

int cmd_front(const Config& cfg, const RunOptions& opt) {
    RunManifest man(opt.outdir, "front", cfg.raw);
    const auto seed = primary_seed(cfg, opt);
    man.add_seed(seed);
    man.write_initial();

    const MediaPath path = build_media(media_with_seed(cfg, seed));
    const ResolvedWave wave = resolve_wave(cfg.wave, path, cfg.analysis.least_mean_r);
    man.set_resolved(wave_json(wave));

    const BackPropConfig bp = backprop_config(cfg, opt.threads);
    const BackPropResult result = back_propagate_front(path, wave.mu, bp);

    std::vector<std::pair<std::string, std::vector<std::string>>> schema;
    for (const auto& run : result.runs) {
        char name[64];
        std::snprintf(name, sizeof(name), "profiles_tau%g.csv", run.tau);
        CsvWriter csv(man.dir() / name, {"t", "y", "u"});
        for (const auto& prof : run.profiles)
            for (std::size_t i = 0; i < prof.y.size(); ++i)
                csv.row({prof.time, prof.y[i], prof.v[i]});
        man.add_output(name);
        schema.emplace_back(name, std::vector<std::string>{"t", "y", "u"});
    }

    {
        CsvWriter csv(man.dir() / "cauchy.csv", {"tau_a", "tau_b", "t", "sup_diff"});
        for (const auto& e : result.cauchy) csv.row({e.tau_a, e.tau_b, e.time, e.sup_diff});
        man.add_output("cauchy.csv");
        schema.emplace_back("cauchy.csv",
                            std::vector<std::string>{"tau_a", "tau_b", "t", "sup_diff"});
    }

    // monotonicity + sandwich report on raw snapshots of the deepest run
    const auto& deep = result.runs.back();
    const EnvelopePair env = make_envelope(path, wave.mu, wave.mu_star, wave.a_bar);
    double x_viol = 0.0, sandwich_lo = 0.0, sandwich_hi = 0.0;
    for (const auto& snap : deep.snapshots) {
        const double disp = displacement_from_zero(path, wave.mu, snap.time);
        for (std::size_t k = 0; k + 1 < snap.u.size(); ++k) {
            const double y = snap.x_of(k) - disp;
            if (y < bp.y_lo || y > bp.y_hi) continue;
            x_viol = std::max(x_viol, snap.u[k + 1] - snap.u[k]);
            sandwich_lo =
                std::max(sandwich_lo, env.lower(snap.x_of(k), snap.time) - snap.u[k]);
            sandwich_hi =
                std::max(sandwich_hi, snap.u[k] - env.upper(snap.x_of(k), snap.time));
        }
    }
    double tau_viol = 0.0;
    for (std::size_t k = 0; k + 1 < result.runs.size(); ++k) {
        for (std::size_t e = 0; e < bp.eval_times.size(); ++e) {
            const auto& sa = result.runs[k].snapshots[e];
            const auto& sb = result.runs[k + 1].snapshots[e];
            const long lo = std::max(sa.offset, sb.offset);
            const long hi = std::min(sa.offset + static_cast<long>(sa.u.size()),
                                     sb.offset + static_cast<long>(sb.u.size()));
            for (long i = lo; i < hi; ++i)
                tau_viol = std::max(tau_viol, sb.u[static_cast<std::size_t>(i - sb.offset)] -
                                                  sa.u[static_cast<std::size_t>(i - sa.offset)]);
        }
    }
    json mono{{"monotone_x_max_violation", x_viol},
              {"monotone_tau_max_violation", tau_viol},
              {"sub_solution_max_violation", sandwich_lo},
              {"super_solution_max_violation", sandwich_hi}};
    write_json(man, "monotonicity.json", mono);

    {
        CsvWriter csv(man.dir() / "tail_ratio.csv", {"t", "y", "ratio"});
        for (const auto& prof : deep.profiles)
            for (std::size_t i = 0; i < prof.y.size(); ++i)
                if (prof.y[i] > 0.0)
                    csv.row({prof.time, prof.y[i], prof.v[i] / std::exp(-wave.mu * prof.y[i])});
        man.add_output("tail_ratio.csv");
        schema.emplace_back("tail_ratio.csv", std::vector<std::string>{"t", "y", "ratio"});
    }

    {
        const double shift = cfg.front.stationarity_shift.value_or(
            cfg.media_period.value_or(1.0));
        const double err =
            stationarity_check(path, wave.mu, shift, cfg.front.stationarity_tau, bp);
        write_json(man, "stationarity.json",
                   {{"t_shift", shift}, {"tau", cfg.front.stationarity_tau}, {"sup_diff", err}});
    }

    export_media(path, man);
    schema.emplace_back("media.csv", std::vector<std::string>{"t", "a"});
    write_csv_schema(man.dir(), schema);
    man.add_output("schema.json");
    man.finalize();
    return 0;
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

int cmd_stability(const Config& cfg, const RunOptions& opt) {
    RunManifest man(opt.outdir, "stability", cfg.raw);
    const auto seed = primary_seed(cfg, opt);
    man.add_seed(seed);
    man.write_initial();

    const MediaPath path = build_media(media_with_seed(cfg, seed));
    const ResolvedWave wave = resolve_wave(cfg.wave, path, cfg.analysis.least_mean_r);
    man.set_resolved(wave_json(wave));

    // front snapshot at t = 0 via back-propagation
    BackPropConfig bp = backprop_config(cfg, 1);
    bp.tau_ladder = {cfg.stability.tau_build};
    bp.eval_times = {0.0};
    const BackPropResult built = back_propagate_front(path, wave.mu, bp);
    LatticeState front = built.runs[0].snapshots[0];

    const auto x0 = level_crossing_rightmost(front, cfg.analysis.lambda);
    if (!x0) throw InfeasibleError("stability: built front has no level crossing");

    // multiplicative perturbation: amp behind the front, tending to 1 ahead
    const double amp = cfg.stability.perturb_amplitude;
    const double dec = cfg.stability.perturb_decay;
    LatticeState pert = front;
    for (std::size_t k = 0; k < pert.u.size(); ++k) {
        const double ahead = std::max(0.0, pert.x_of(k) - *x0);
        pert.u[k] = front.u[k] * (1.0 + amp * std::exp(-dec * ahead));
    }
    pert.sup_bound = std::max(1.0, *std::max_element(pert.u.begin(), pert.u.end()));
    front.sup_bound = pert.sup_bound;  // evolve both under the common cap

    SimConfig sim = cfg.sim.to_sim_config(cfg.analysis.lambda);
    if (sim.dt <= 0.0) sim.dt = auto_dt(path.a_max(), pert.sup_bound);

    StabilityReport report;
    FrontSeries series;
    const double behind = cfg.analysis.alpha_behind, ahead = cfg.analysis.alpha_ahead;

    auto record = [&](double t) {
        const auto x = level_crossing_rightmost(front, cfg.analysis.lambda);
        if (!x) return;
        const long lo = static_cast<long>(std::floor((*x - behind) * front.m));
        const long hi = static_cast<long>(std::ceil((*x + ahead) * front.m));
        const AlphaResult a = alpha_ratio(pert, front, cfg.analysis.alpha_floor, lo, hi);
        report.times.push_back(t);
        report.alpha.push_back(a.alpha);
        report.ratio_sup.push_back(a.ratio_sup);
        report.ratio_inf.push_back(a.ratio_inf);
        series.times.push_back(t);
        series.positions.push_back(*x);
        series.theoretical_positions.push_back(displacement_from_zero(path, wave.mu, t));
        double fit = std::numeric_limits<double>::quiet_NaN();
        try {
            fit = decay_rate(front, *x + cfg.analysis.tail_offset,
                             *x + cfg.analysis.tail_offset + cfg.analysis.tail_length);
        } catch (const std::invalid_argument&) {
        }
        series.mu_hat.push_back(fit);
    };

    // lockstep evolution, shared recentering driven by the reference front
    record(0.0);
    double next_record = sim.record_dt;
    while (front.time < cfg.stability.t_end - 1e-12) {
        const double stop = std::min(cfg.stability.t_end, next_record);
        while (front.time < stop - 1e-12) {
            const double h = std::min(sim.dt, stop - front.time);
            step(front, path, h, sim);
            step(pert, path, h, sim);
            const long demand = window_shift_demand(front, sim);
            if (demand > 0) {
                shift_window_right(front, demand);
                shift_window_right(pert, demand);
            }
        }
        front.time = pert.time = stop;
        record(stop);
        next_record = stop + sim.record_dt;
    }

    std::vector<std::pair<std::string, std::vector<std::string>>> schema;
    {
        CsvWriter csv(man.dir() / "alpha.csv", {"t", "alpha", "ratio_sup", "ratio_inf"});
        for (std::size_t i = 0; i < report.times.size(); ++i)
            csv.row({report.times[i], report.alpha[i], report.ratio_sup[i], report.ratio_inf[i]});
        man.add_output("alpha.csv");
        schema.emplace_back("alpha.csv",
                            std::vector<std::string>{"t", "alpha", "ratio_sup", "ratio_inf"});
    }
    {
        CsvWriter csv(man.dir() / "front_series.csv", {"t", "X", "X_theory", "mu_hat"});
        for (std::size_t i = 0; i < series.times.size(); ++i)
            csv.row({series.times[i], series.positions[i], series.theoretical_positions[i],
                     series.mu_hat[i]});
        man.add_output("front_series.csv");
        schema.emplace_back("front_series.csv",
                            std::vector<std::string>{"t", "X", "X_theory", "mu_hat"});
    }

    double mono_viol = 0.0;
    for (std::size_t i = 0; i + 1 < report.alpha.size(); ++i)
        mono_viol = std::max(mono_viol, report.alpha[i + 1] - report.alpha[i]);
    write_json(man, "summary.json",
               {{"alpha_initial", report.alpha.front()},
                {"alpha_final", report.alpha.back()},
                {"alpha_monotonicity_violation", mono_viol},
                {"perturb_amplitude", amp},
                {"perturb_decay", dec}});

    export_media(path, man);
    schema.emplace_back("media.csv", std::vector<std::string>{"t", "a"});
    write_csv_schema(man.dir(), schema);
    man.add_output("schema.json");
    man.finalize();
    return 0;
}

// ---------------------------------------------------------------------------
// spreading
// ---------------------------------------------------------------------------

int cmd_spreading(const Config& cfg, const RunOptions& opt) {
    RunManifest man(opt.outdir, "spreading", cfg.raw);
    man.write_initial();

    const auto seeds = seed_set(cfg, opt);
    for (auto s : seeds) man.add_seed(s);

    std::vector<json> summaries(seeds.size());
    std::vector<std::string> files(seeds.size());
    std::mutex man_mx;

    run_parallel(seeds.size(), opt.threads, [&](std::size_t k) {
        const MediaPath path = build_media(media_with_seed(cfg, seeds[k]));
        const double a_bar = resolve_a_lower(path, cfg.analysis.least_mean_r);
        const double c0 = minimize_envelope(a_bar).c0;

        SpreadingConfig sc;
        sc.support_halfwidth = cfg.spreading.support_halfwidth;
        sc.support_height = cfg.spreading.support_height;
        sc.window_halfwidth = cfg.spreading.window_halfwidth;
        sc.lambda = cfg.analysis.lambda;
        sc.sim = cfg.sim.to_sim_config(cfg.analysis.lambda);
        sc.sim.right = RightBoundary::Geometric;
        const SpreadingResult res = spreading_speed(path, sc, cfg.spreading.t_end);

        char name[64];
        std::snprintf(name, sizeof(name), "flanks_seed%llu.csv",
                      static_cast<unsigned long long>(seeds[k]));
        {
            CsvWriter csv(man.dir() / name, {"t", "X_right", "X_left"});
            for (std::size_t i = 0; i < res.times.size(); ++i)
                csv.row({res.times[i], res.right_positions[i], res.left_positions[i]});
        }
        files[k] = name;
        summaries[k] = {{"seed", seeds[k]},
                        {"right_speed", res.right_speed},
                        {"left_speed", res.left_speed},
                        {"c0", c0},
                        {"right_rel_err", std::abs(res.right_speed - c0) / c0},
                        {"left_rel_err", std::abs(res.left_speed - c0) / c0}};
        std::lock_guard<std::mutex> lock(man_mx);
        man.add_output(name);
    });

    write_json(man, "summary.json", {{"runs", summaries}});
    std::vector<std::pair<std::string, std::vector<std::string>>> schema;
    for (const auto& f : files)
        schema.emplace_back(f, std::vector<std::string>{"t", "X_right", "X_left"});
    write_csv_schema(man.dir(), schema);
    man.add_output("schema.json");
    man.finalize();
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const Config& cfg, const RunOptions& opt) {
    RunManifest man(opt.outdir, "simulate", cfg.raw);
    const auto seed = primary_seed(cfg, opt);
    man.add_seed(seed);
    man.write_initial();

    const MediaPath path = build_media(media_with_seed(cfg, seed));

    double mu = 0.0;
    std::function<double(double)> profile;
    const auto& ps = cfg.simulate.profile;
    if (ps.kind == "constant") {
        profile = [&](double) { return ps.value; };
    } else if (ps.kind == "step") {
        profile = [&](double x) { return x <= ps.step_at ? 1.0 : 0.0; };
    } else if (ps.kind == "compact") {
        profile = [&](double x) {
            return std::abs(x) <= static_cast<double>(ps.halfwidth) ? ps.value : 0.0;
        };
    } else {  // super-solution snapshot, needs the wave
        const ResolvedWave wave = resolve_wave(cfg.wave, path, cfg.analysis.least_mean_r);
        man.set_resolved(wave_json(wave));
        mu = wave.mu;
        profile = [mu](double x) { return std::min(1.0, std::exp(-mu * x)); };
    }
    if (mu == 0.0 && (cfg.wave.mu || cfg.wave.gamma)) {
        const ResolvedWave wave = resolve_wave(cfg.wave, path, cfg.analysis.least_mean_r);
        man.set_resolved(wave_json(wave));
        mu = wave.mu;
    }

    LatticeState state = init_from_profile(profile, cfg.simulate.window_lo,
                                           cfg.simulate.window_hi, cfg.sim.m, 0.0);
    SimConfig sim = cfg.sim.to_sim_config(cfg.analysis.lambda);

    CsvWriter snaps(man.dir() / "snapshots.csv", {"t", "site", "x", "u"});
    double next_snap = 0.0;
    const double snap_dt = cfg.simulate.snapshot_dt;
    SeriesRecorderConfig rec;
    rec.lambda = cfg.analysis.lambda;
    rec.tail_offset = cfg.analysis.tail_offset;
    rec.tail_length = cfg.analysis.tail_length;

    FrontSeries series;
    std::vector<WindowShift> shifts;
    {
        auto recorder = [&](const LatticeState& s) {
            series.times.push_back(s.time);
            series.theoretical_positions.push_back(
                mu > 0.0 ? displacement_from_zero(path, mu, s.time)
                         : std::numeric_limits<double>::quiet_NaN());
            const auto x = level_crossing_rightmost(s, rec.lambda);
            series.positions.push_back(x ? *x : std::numeric_limits<double>::quiet_NaN());
            double fit = std::numeric_limits<double>::quiet_NaN();
            if (x) {
                try {
                    fit = decay_rate(s, *x + rec.tail_offset,
                                     *x + rec.tail_offset + rec.tail_length);
                } catch (const std::invalid_argument&) {
                }
            }
            series.mu_hat.push_back(fit);
            if (snap_dt > 0.0 && s.time >= next_snap - 1e-9) {
                for (std::size_t k = 0; k < s.u.size(); ++k)
                    snaps.row({s.time, static_cast<double>(s.offset + static_cast<long>(k)),
                               s.x_of(k), s.u[k]});
                next_snap += snap_dt;
            }
        };
        const EvolveResult res = evolve(state, path, cfg.simulate.t_end, sim, recorder);
        shifts = res.shifts;
    }
    man.add_output("snapshots.csv");

    {
        CsvWriter csv(man.dir() / "series.csv", {"t", "X", "X_theory", "mu_hat"});
        for (std::size_t i = 0; i < series.times.size(); ++i)
            csv.row({series.times[i], series.positions[i], series.theoretical_positions[i],
                     series.mu_hat[i]});
        man.add_output("series.csv");
    }

    json shifts_json = json::array();
    for (const auto& s : shifts) shifts_json.push_back({{"t", s.time}, {"sites", s.sites}});
    json summary{{"t_end", state.time}, {"window_shifts", shifts_json}};
    try {
        const auto est = least_mean_speed(series, cfg.analysis.least_mean_r);
        summary["speed"] = {{"least_mean", est.least_mean},
                            {"regression_slope", est.regression_slope},
                            {"window_floor_r", cfg.analysis.least_mean_r}};
    } catch (const std::invalid_argument&) {
        // series too short or no crossing; no speed estimate emitted
    }
    write_json(man, "summary.json", summary);

    export_media(path, man);
    write_csv_schema(man.dir(), {{"series.csv", {"t", "X", "X_theory", "mu_hat"}},
                                 {"snapshots.csv", {"t", "site", "x", "u"}},
                                 {"media.csv", {"t", "a"}}});
    man.add_output("schema.json");
    man.finalize();
    return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

namespace {

struct PropertyResult {
    std::string name;
    bool pass = false;
    bool instability = false;
    std::string detail;
};

// smooth bounded profile in [lo, hi], flat near the window edges
std::function<double(double)> smooth_random_profile(std::mt19937_64& rng, double lo, double hi,
                                                    double window_halfwidth) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double a1 = unif(rng), a2 = unif(rng), a3 = unif(rng);
    const double f1 = 0.05 + 0.15 * unif(rng), f2 = 0.05 + 0.15 * unif(rng);
    const double w = window_halfwidth;
    return [=](double x) {
        const double taper = 0.5 * (1.0 + std::cos(std::acos(-1.0) * std::clamp(std::abs(x) / w, 0.0, 1.0)));
        const double osc = std::sin(f1 * x + 6.28 * a1) + std::sin(f2 * x + 6.28 * a2);
        const double v = 0.5 * (lo + hi) + 0.25 * (hi - lo) * osc * taper * (0.5 + 0.5 * a3);
        return std::clamp(v, lo, hi);
    };
}

}  // namespace

int cmd_validate(const Config& cfg, const RunOptions& opt) {
    RunManifest man(opt.outdir, "validate", cfg.raw);
    const auto seed = primary_seed(cfg, opt);
    man.add_seed(seed);
    man.write_initial();

    const MediaPath path = build_media(media_with_seed(cfg, seed));
    std::vector<PropertyResult> results;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);

    auto run_property = [&](const std::string& name, const std::function<std::string()>& body) {
        PropertyResult r;
        r.name = name;
        try {
            r.detail = body();
            r.pass = r.detail.empty();
            if (!r.pass && r.detail.empty()) r.detail = "failed";
        } catch (const IntegrationError& e) {
            r.instability = true;
            r.detail = std::string("instability: ") + e.what();
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results.push_back(r);
        std::cout << (r.pass ? "[pass] " : "[FAIL] ") << name
                  << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
    };

    const double t_lo_ok = std::max(path.t_min(), 0.0);
    (void)t_lo_ok;

    // ordered pairs stay ordered (lockstep evolution, comparison at every step)
    run_property("comparison_principle", [&]() -> std::string {
        SimConfig sim = cfg.sim.to_sim_config(cfg.analysis.lambda);
        sim.moving_window = false;
        sim.right = RightBoundary::Zero;  // monotone coupling at the edge
        sim.left = LeftBoundary::Copy;
        const long W = 40;
        double worst = 0.0;
        for (int p = 0; p < cfg.validate.pairs; ++p) {
            auto f = smooth_random_profile(rng, 0.0, 1.4, 40.0);
            auto g = smooth_random_profile(rng, 0.0, 1.4, 40.0);
            LatticeState a = init_from_profile(
                [&](double x) { return std::min(f(x), g(x)); }, -W, W, 1, 0.0);
            LatticeState b = init_from_profile(
                [&](double x) { return std::max(f(x), g(x)); }, -W, W, 1, 0.0);
            b.sup_bound = a.sup_bound = std::max(a.sup_bound, b.sup_bound);
            const double h = sim.dt > 0.0 ? sim.dt : auto_dt(path.a_max(), a.sup_bound);
            while (a.time < cfg.validate.pair_t_end - 1e-12) {
                const double hh = std::min(h, cfg.validate.pair_t_end - a.time);
                step(a, path, hh, sim);
                step(b, path, hh, sim);
                for (std::size_t k = 0; k < a.u.size(); ++k)
                    worst = std::max(worst, a.u[k] - b.u[k]);
            }
        }
        return worst <= 1e-8 ? "" : "ordering violated by " + full_precision(worst);
    });

    // homogeneous data against the closed-form logistic
    run_property("logistic_oracle", [&]() -> std::string {
        SimConfig sim = cfg.sim.to_sim_config(cfg.analysis.lambda);
        sim.moving_window = false;
        sim.dt = cfg.sim.dt > 0.0 ? cfg.sim.dt : 1e-3;
        LatticeState s = init_from_profile([](double) { return 0.5; }, -20, 20, 1, 0.0);
        const double t_end = std::min(cfg.validate.t_end, path.t_max() - 0.5);
        double worst = 0.0, drift = 0.0;
        const double q0 = (1.0 / 0.5 - 1.0);
        evolve(s, path, t_end, sim, [&](const LatticeState& st) {
            const double ref = homogeneous_oracle(0.5, path, st.time);
            for (double v : st.u) worst = std::max(worst, std::abs(v - ref));
            const double q =
                (1.0 / st.u[st.u.size() / 2] - 1.0) * std::exp(path.integrate_from_zero(st.time));
            drift = std::max(drift, std::abs(q - q0));
        });
        if (worst > 1e-8) return "oracle deviation " + full_precision(worst);
        if (drift > 1e-7) return "conserved quantity drift " + full_precision(drift);
        return "";
    });

    // |u - 1| <= C exp(-int a) for data bounded away from 0
    run_property("equilibrium_stability", [&]() -> std::string {
        SimConfig sim = cfg.sim.to_sim_config(cfg.analysis.lambda);
        sim.moving_window = false;
        const long W = 160, margin = 80;
        auto f = smooth_random_profile(rng, 0.5, 2.0, static_cast<double>(W));
        LatticeState s = init_from_profile(f, -W, W, 1, 0.0);
        double lo = 2.0, hi = 0.5;
        for (double v : s.u) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double C = hi * std::max(1.0 / lo - 1.0, 1.0 - 1.0 / hi);
        const double t_end = std::min(cfg.validate.t_end, path.t_max() - 0.5);
        double worst = 0.0;
        evolve(s, path, t_end, sim, [&](const LatticeState& st) {
            const double bound = C * std::exp(-path.integrate_from_zero(st.time)) + 1e-8;
            for (std::size_t k = 0; k < st.u.size(); ++k) {
                const long i = st.offset + static_cast<long>(k);
                if (i < -W + margin || i > W - margin) continue;
                worst = std::max(worst, std::abs(st.u[k] - 1.0) - bound);
            }
        });
        return worst <= 0.0 ? "" : "decay bound exceeded by " + full_precision(worst);
    });

    // residual sweeps + the corrector inequality
    run_property("envelope_residuals", [&]() -> std::string {
        const double a_bar = resolve_a_lower(path, cfg.analysis.least_mean_r);
        const DispersionResult d = minimize_envelope(a_bar);
        const double mu = (cfg.wave.mu || cfg.wave.gamma)
                              ? resolve_wave(cfg.wave, path, cfg.analysis.least_mean_r).mu
                              : 0.5 * d.mu_star;
        const EnvelopePair env = make_envelope(path, mu, d.mu_star, a_bar);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double t_a = path.t_min() + 1.0, t_b = path.t_max() - 1.0;
        double worst_super = 0.0, worst_sub = 0.0;
        for (int k = 0; k < cfg.validate.residual_points; ++k) {
            const double t = t_a + (t_b - t_a) * unif(rng);
            const double disp = displacement_from_zero(path, mu, t);
            const double xs = disp - 20.0 + 45.0 * unif(rng);
            worst_super = std::min(worst_super, residual_super(env.upper, xs, t));
            const double xb = env.lower.crest(t) + 25.0 * unif(rng);
            worst_sub = std::max(worst_sub, residual_sub(env.lower, xb, t));
        }
        const auto& corr = env.lower.corrector();
        double corr_viol = 0.0;
        for (std::size_t i = 0; i + 1 < corr.values.size(); ++i) {
            const double mid_a = 0.5 * (path.node_value(i) + path.node_value(i + 1));
            const double slope = (corr.values[i + 1] - corr.values[i]) / corr.dt;
            corr_viol = std::max(corr_viol,
                                 corr.threshold - ((1.0 - corr.delta) * mid_a + slope));
        }
        if (worst_super < -1e-6) return "super residual " + full_precision(worst_super);
        if (worst_sub > 1e-6) return "sub residual " + full_precision(worst_sub);
        if (corr_viol > 1e-12) return "corrector inequality off by " + full_precision(corr_viol);
        return "";
    });

    json report = json::array();
    bool all_pass = true, any_instability = false;
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        any_instability = any_instability || r.instability;
        report.push_back({{"property", r.name},
                          {"pass", r.pass},
                          {"instability", r.instability},
                          {"detail", r.detail}});
    }
    write_json(man, "validate_report.json", {{"properties", report}, {"all_pass", all_pass}});
    export_media(path, man);
    write_csv_schema(man.dir(), {{"media.csv", {"t", "a"}}});
    man.add_output("schema.json");
    man.finalize();
    if (any_instability) return 5;
    return all_pass ? 0 : 4;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

int run_command(const std::string& name, const Config& cfg, const RunOptions& opt) {
    try {
        if (name == "speedscan") return cmd_speedscan(cfg, opt);
        if (name == "envelope") return cmd_envelope(cfg, opt);
        if (name == "front") return cmd_front(cfg, opt);
        if (name == "stability") return cmd_stability(cfg, opt);
        if (name == "spreading") return cmd_spreading(cfg, opt);
        if (name == "simulate") return cmd_simulate(cfg, opt);
        if (name == "validate") return cmd_validate(cfg, opt);
        std::cerr << "unknown command: " << name << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const OutOfHorizonError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const IntegrationError& e) {
        std::cerr << "instability: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace latfront
