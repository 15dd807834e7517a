#include "latfront/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "latfront/errors.hpp"
#include "latfront/version.hpp"

namespace latfront {

using nlohmann::json;

SimConfig SimSpec::to_sim_config(double lambda) const {
    SimConfig c;
    c.dt = dt;
    c.left = left;
    c.left_value = left_value;
    c.right = right;
    c.record_dt = record_dt;
    c.moving_window = moving_window;
    c.window_margin_frac = window_margin_frac;
    c.window_shift_frac = window_shift_frac;
    c.lambda = lambda;
    return c;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            fail(path + "/" + it.key(), "unknown key (typo-proof schema rejects extras)");
    }
}

double num(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "/" + key, "expected a number");
    return obj[key].get<double>();
}

double req_num(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path, std::string("missing required key '") + key + "'");
    if (!obj[key].is_number()) fail(path + "/" + key, "expected a number");
    return obj[key].get<double>();
}

std::string str(const json& obj, const std::string& path, const char* key,
                const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(path + "/" + key, "expected a string");
    return obj[key].get<std::string>();
}

std::vector<double> num_list(const json& obj, const std::string& path, const char* key,
                             std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array()) fail(path + "/" + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) fail(path + "/" + key, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

MediaModel parse_media(const json& j, const std::string& path) {
    require_keys(j, path,
                 {"kind", "horizon", "dt", "seed", "value", "offset", "terms", "low", "high",
                  "mean_holding_low", "mean_holding_high", "ramp_width", "a_min", "a_max",
                  "node_spacing"});
    MediaModel m;
    const std::string kind = str(j, path, "kind", "");
    if (kind == "constant")
        m.kind = MediaKind::Constant;
    else if (kind == "periodic_sum")
        m.kind = MediaKind::PeriodicSum;
    else if (kind == "telegraph")
        m.kind = MediaKind::Telegraph;
    else if (kind == "random_spline")
        m.kind = MediaKind::RandomSpline;
    else
        fail(path + "/kind", "expected one of constant|periodic_sum|telegraph|random_spline");

    if (!j.contains("horizon") || !j["horizon"].is_array() || j["horizon"].size() != 2)
        fail(path + "/horizon", "expected [t_lo, t_hi]");
    m.t_lo = j["horizon"][0].get<double>();
    m.t_hi = j["horizon"][1].get<double>();
    m.dt = num(j, path, "dt", 1e-2);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) fail(path + "/seed", "expected an integer");
        m.seed = j["seed"].get<std::uint64_t>();
    }
    m.value = num(j, path, "value", 1.0);
    m.offset = num(j, path, "offset", 1.0);
    if (j.contains("terms")) {
        if (!j["terms"].is_array()) fail(path + "/terms", "expected an array");
        for (const auto& t : j["terms"]) {
            require_keys(t, path + "/terms[]", {"amplitude", "frequency", "phase"});
            PeriodicTerm term;
            term.amplitude = req_num(t, path + "/terms[]", "amplitude");
            term.frequency = num(t, path + "/terms[]", "frequency", 1.0);
            term.phase = num(t, path + "/terms[]", "phase", 0.0);
            m.terms.push_back(term);
        }
    }
    m.low = num(j, path, "low", 0.5);
    m.high = num(j, path, "high", 1.5);
    m.mean_holding_low = num(j, path, "mean_holding_low", 2.0);
    m.mean_holding_high = num(j, path, "mean_holding_high", 2.0);
    m.ramp_width = num(j, path, "ramp_width", 1e-2);
    m.a_min = num(j, path, "a_min", 0.3);
    m.a_max = num(j, path, "a_max", 2.0);
    m.node_spacing = num(j, path, "node_spacing", 1.0);
    return m;
}

}  // namespace

namespace {
Config parse_config_checked(const json& j, const std::string& origin);
}

Config parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // count the line of the failing byte for the message
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError(origin + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
    }
    try {
        return parse_config_checked(j, origin);
    } catch (const json::exception& e) {
        // wrong value type somewhere the schema walk did not anticipate
        throw ConfigError(origin + ": " + e.what());
    }
}

namespace {

Config parse_config_checked(const json& j, const std::string& origin) {
    const std::string root = origin;
    require_keys(j, root,
                 {"version", "media", "wave", "sim", "analysis", "front", "stability",
                  "spreading", "speedscan", "envelope", "simulate", "validate", "seeds",
                  "output"});

    Config cfg;
    if (!j.contains("version") || !j["version"].is_number_integer())
        fail(root + "/version", "missing integer schema version");
    cfg.version = j["version"].get<int>();
    if (cfg.version != kConfigSchemaVersion)
        fail(root + "/version", "unsupported schema version " + std::to_string(cfg.version) +
                                    " (expected " + std::to_string(kConfigSchemaVersion) + ")");

    if (!j.contains("media")) fail(root, "missing required section 'media'");
    cfg.media = parse_media(j["media"], root + "/media");
    if (cfg.media.kind == MediaKind::PeriodicSum && cfg.media.terms.size() == 1 &&
        cfg.media.terms[0].frequency > 0.0)
        cfg.media_period = 2.0 * std::acos(-1.0) / cfg.media.terms[0].frequency;

    if (j.contains("wave")) {
        const auto& w = j["wave"];
        require_keys(w, root + "/wave", {"mu", "gamma"});
        if (w.contains("mu")) cfg.wave.mu = req_num(w, root + "/wave", "mu");
        if (w.contains("gamma")) cfg.wave.gamma = req_num(w, root + "/wave", "gamma");
        if (cfg.wave.mu.has_value() == cfg.wave.gamma.has_value())
            fail(root + "/wave", "exactly one of 'mu' and 'gamma' must be given");
    }

    if (j.contains("sim")) {
        const auto& s = j["sim"];
        require_keys(s, root + "/sim",
                     {"m", "width", "dt", "boundary_left", "left_value", "boundary_right",
                      "record_dt", "moving_window", "window_margin_frac", "window_shift_frac"});
        cfg.sim.m = static_cast<int>(num(s, root + "/sim", "m", 1));
        cfg.sim.width = static_cast<long>(num(s, root + "/sim", "width", 800));
        cfg.sim.dt = num(s, root + "/sim", "dt", 0.0);
        const std::string bl = str(s, root + "/sim", "boundary_left", "copy");
        if (bl == "copy")
            cfg.sim.left = LeftBoundary::Copy;
        else if (bl == "fixed")
            cfg.sim.left = LeftBoundary::Fixed;
        else if (bl == "homogeneous_tracker")
            cfg.sim.left = LeftBoundary::HomogeneousTracker;
        else
            fail(root + "/sim/boundary_left", "expected copy|fixed|homogeneous_tracker");
        cfg.sim.left_value = num(s, root + "/sim", "left_value", 0.0);
        const std::string br = str(s, root + "/sim", "boundary_right", "geometric");
        if (br == "zero")
            cfg.sim.right = RightBoundary::Zero;
        else if (br == "geometric")
            cfg.sim.right = RightBoundary::Geometric;
        else
            fail(root + "/sim/boundary_right", "expected zero|geometric");
        cfg.sim.record_dt = num(s, root + "/sim", "record_dt", 1.0);
        if (s.contains("moving_window")) {
            if (!s["moving_window"].is_boolean())
                fail(root + "/sim/moving_window", "expected a boolean");
            cfg.sim.moving_window = s["moving_window"].get<bool>();
        }
        cfg.sim.window_margin_frac = num(s, root + "/sim", "window_margin_frac", 0.25);
        cfg.sim.window_shift_frac = num(s, root + "/sim", "window_shift_frac", 0.25);
        if (cfg.sim.m < 1) fail(root + "/sim/m", "m must be >= 1");
        if (cfg.sim.width < 8) fail(root + "/sim/width", "width must be >= 8 sites");
        if (cfg.sim.record_dt <= 0.0) fail(root + "/sim/record_dt", "record_dt must be positive");
    }

    if (j.contains("analysis")) {
        const auto& a = j["analysis"];
        const std::string p = root + "/analysis";
        require_keys(a, p,
                     {"lambda", "tail_offset", "tail_length", "least_mean_r", "alpha_behind",
                      "alpha_ahead", "alpha_floor"});
        cfg.analysis.lambda = num(a, p, "lambda", 0.5);
        cfg.analysis.tail_offset = num(a, p, "tail_offset", 10.0);
        cfg.analysis.tail_length = num(a, p, "tail_length", 10.0);
        cfg.analysis.least_mean_r = num(a, p, "least_mean_r", 20.0);
        cfg.analysis.alpha_behind = num(a, p, "alpha_behind", 50.0);
        cfg.analysis.alpha_ahead = num(a, p, "alpha_ahead", 20.0);
        cfg.analysis.alpha_floor = num(a, p, "alpha_floor", 1e-12);
        if (!(cfg.analysis.lambda > 0.0 && cfg.analysis.lambda < 1.0))
            fail(p + "/lambda", "lambda must lie in (0,1)");
    }

    if (j.contains("front")) {
        const auto& f = j["front"];
        const std::string p = root + "/front";
        require_keys(f, p,
                     {"tau_ladder", "eval_times", "y_window", "dy", "pad_behind", "pad_ahead",
                      "stationarity_shift", "stationarity_tau"});
        cfg.front.tau_ladder = num_list(f, p, "tau_ladder", cfg.front.tau_ladder);
        cfg.front.eval_times = num_list(f, p, "eval_times", cfg.front.eval_times);
        if (f.contains("y_window")) {
            if (!f["y_window"].is_array() || f["y_window"].size() != 2)
                fail(p + "/y_window", "expected [y_lo, y_hi]");
            cfg.front.y_lo = f["y_window"][0].get<double>();
            cfg.front.y_hi = f["y_window"][1].get<double>();
        }
        cfg.front.dy = num(f, p, "dy", 0.25);
        cfg.front.pad_behind = num(f, p, "pad_behind", 12.0);
        cfg.front.pad_ahead = num(f, p, "pad_ahead", 12.0);
        if (f.contains("stationarity_shift"))
            cfg.front.stationarity_shift = req_num(f, p, "stationarity_shift");
        cfg.front.stationarity_tau = num(f, p, "stationarity_tau", 80.0);
    }

    if (j.contains("stability")) {
        const auto& s = j["stability"];
        const std::string p = root + "/stability";
        require_keys(s, p, {"t_end", "perturb_amplitude", "perturb_decay", "tau_build"});
        cfg.stability.t_end = num(s, p, "t_end", 100.0);
        cfg.stability.perturb_amplitude = num(s, p, "perturb_amplitude", 0.5);
        cfg.stability.perturb_decay = num(s, p, "perturb_decay", 0.1);
        cfg.stability.tau_build = num(s, p, "tau_build", 40.0);
        if (!(cfg.stability.perturb_amplitude > -1.0))
            fail(p + "/perturb_amplitude", "amplitude must exceed -1 to keep the data positive");
        if (cfg.stability.perturb_amplitude != 0.0 && !(cfg.stability.perturb_decay > 0.0))
            fail(p + "/perturb_decay",
                 "perturbation tail ratio must tend to 1 ahead of the front (decay > 0)");
    }

    if (j.contains("spreading")) {
        const auto& s = j["spreading"];
        const std::string p = root + "/spreading";
        require_keys(s, p, {"t_end", "support_halfwidth", "support_height", "window_halfwidth"});
        cfg.spreading.t_end = num(s, p, "t_end", 100.0);
        cfg.spreading.support_halfwidth = static_cast<long>(num(s, p, "support_halfwidth", 5));
        cfg.spreading.support_height = num(s, p, "support_height", 1.0);
        cfg.spreading.window_halfwidth = static_cast<long>(num(s, p, "window_halfwidth", 300));
        if (!(cfg.spreading.support_height > 0.0))
            fail(p + "/support_height", "support height must be positive (nonzero data)");
    }

    if (j.contains("speedscan")) {
        const auto& s = j["speedscan"];
        const std::string p = root + "/speedscan";
        require_keys(s, p, {"mu_lo", "mu_hi", "points", "gammas"});
        cfg.speedscan.mu_lo = num(s, p, "mu_lo", 1e-3);
        cfg.speedscan.mu_hi = num(s, p, "mu_hi", 20.0);
        cfg.speedscan.points = static_cast<int>(num(s, p, "points", 200));
        cfg.speedscan.gammas = num_list(s, p, "gammas", {});
        if (!(cfg.speedscan.mu_lo > 0.0 && cfg.speedscan.mu_lo < cfg.speedscan.mu_hi))
            fail(p, "need 0 < mu_lo < mu_hi");
        if (cfg.speedscan.points < 2) fail(p + "/points", "need at least 2 points");
    }

    if (j.contains("envelope")) {
        const auto& e = j["envelope"];
        const std::string p = root + "/envelope";
        require_keys(e, p, {"y_window", "dy", "times", "fd_step"});
        if (e.contains("y_window")) {
            if (!e["y_window"].is_array() || e["y_window"].size() != 2)
                fail(p + "/y_window", "expected [y_lo, y_hi]");
            cfg.envelope.y_lo = e["y_window"][0].get<double>();
            cfg.envelope.y_hi = e["y_window"][1].get<double>();
        }
        cfg.envelope.dy = num(e, p, "dy", 0.5);
        cfg.envelope.times = num_list(e, p, "times", cfg.envelope.times);
        cfg.envelope.fd_step = num(e, p, "fd_step", 1e-4);
        if (!(cfg.envelope.dy > 0.0)) fail(p + "/dy", "dy must be positive");
        if (!(cfg.envelope.fd_step > 0.0)) fail(p + "/fd_step", "fd_step must be positive");
    }

    if (j.contains("simulate")) {
        const auto& s = j["simulate"];
        const std::string p = root + "/simulate";
        require_keys(s, p, {"t_end", "profile", "snapshot_dt", "window"});
        cfg.simulate.t_end = num(s, p, "t_end", 10.0);
        cfg.simulate.snapshot_dt = num(s, p, "snapshot_dt", 0.0);
        if (s.contains("window")) {
            if (!s["window"].is_array() || s["window"].size() != 2)
                fail(p + "/window", "expected [i_lo, i_hi]");
            cfg.simulate.window_lo = s["window"][0].get<long>();
            cfg.simulate.window_hi = s["window"][1].get<long>();
        }
        if (s.contains("profile")) {
            const auto& pr = s["profile"];
            require_keys(pr, p + "/profile", {"kind", "value", "step_at", "halfwidth"});
            cfg.simulate.profile.kind = str(pr, p + "/profile", "kind", "step");
            cfg.simulate.profile.value = num(pr, p + "/profile", "value", 0.5);
            cfg.simulate.profile.step_at = num(pr, p + "/profile", "step_at", 0.0);
            cfg.simulate.profile.halfwidth =
                static_cast<long>(num(pr, p + "/profile", "halfwidth", 5));
            const std::string k = cfg.simulate.profile.kind;
            if (k != "constant" && k != "step" && k != "compact" && k != "super")
                fail(p + "/profile/kind", "expected constant|step|compact|super");
        }
    }

    if (j.contains("validate")) {
        const auto& v = j["validate"];
        const std::string p = root + "/validate";
        require_keys(v, p, {"pairs", "pair_t_end", "residual_points", "t_end"});
        cfg.validate.pairs = static_cast<int>(num(v, p, "pairs", 60));
        cfg.validate.pair_t_end = num(v, p, "pair_t_end", 5.0);
        cfg.validate.residual_points = static_cast<int>(num(v, p, "residual_points", 300));
        cfg.validate.t_end = num(v, p, "t_end", 10.0);
    }

    if (j.contains("seeds")) {
        if (!j["seeds"].is_array()) fail(root + "/seeds", "expected an array of integers");
        cfg.seeds.clear();
        for (const auto& s : j["seeds"]) {
            if (!s.is_number_integer()) fail(root + "/seeds", "expected an array of integers");
            cfg.seeds.push_back(s.get<std::uint64_t>());
        }
        if (cfg.seeds.empty()) fail(root + "/seeds", "seed set must not be empty");
    }

    if (j.contains("output")) {
        require_keys(j["output"], root + "/output", {"dir"});
        cfg.output_dir = str(j["output"], root + "/output", "dir", "runs");
    }

    cfg.raw = j;
    return cfg;
}

}  // namespace

Config load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file: " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), file.string());
}

double resolve_a_lower(const MediaPath& path, double least_mean_r) {
    if (path.analytic_mean()) return *path.analytic_mean();
    const double span = path.t_max() - path.t_min();
    const double r = std::min(least_mean_r, span / 2.5);
    return empirical_least_mean(path, r).least_mean;
}

ResolvedWave resolve_wave(const WaveSpec& wave, const MediaPath& path, double least_mean_r) {
    if (wave.mu.has_value() == wave.gamma.has_value())
        throw ConfigError("wave spec must carry exactly one of mu / gamma");

    ResolvedWave r;
    r.a_bar = resolve_a_lower(path, least_mean_r);
    const DispersionResult d = minimize_envelope(r.a_bar);
    r.mu_star = d.mu_star;
    r.c0 = d.c0;
    if (wave.gamma) {
        r.from_gamma = true;
        r.gamma = *wave.gamma;
        const SpeedRoots roots = speed_roots(r.gamma, r.a_bar);
        if (roots.degenerate)
            throw ConfigError("gamma equals the minimal speed c0; critical fronts are not built");
        r.mu = roots.mu_small;
    } else {
        r.mu = *wave.mu;
        if (!(r.mu > 0.0 && r.mu < r.mu_star))
            throw ConfigError("mu=" + std::to_string(r.mu) + " must lie in (0, mu_star=" +
                              std::to_string(r.mu_star) + ")");
        r.gamma = envelope_speed(r.mu, r.a_bar);
    }
    return r;
}

}  // namespace latfront
