#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <cmath>
#include <cstdio>
#include <string>

#include "latfront/commands.hpp"
#include "latfront/config.hpp"
#include "latfront/dispersion.hpp"
#include "latfront/errors.hpp"
#include "latfront/manifest.hpp"

using namespace latfront;
namespace fs = std::filesystem;

namespace {

std::string minimal_config(const std::string& extra = "") {
    return R"({
  "version": 1,
  "media": { "kind": "constant", "horizon": [-10.0, 30.0], "value": 1.0 })" +
           (extra.empty() ? "" : ",\n" + extra) + "\n}";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "latfront_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

// =============================================================================
// Config schema
// =============================================================================

TEST_CASE("minimal config parses with defaults") {
    const auto cfg = parse_config(minimal_config());
    CHECK(cfg.media.kind == MediaKind::Constant);
    CHECK(cfg.sim.width == 800);
    CHECK(cfg.analysis.lambda == 0.5);
    CHECK(cfg.seeds.size() == 1);
}

TEST_CASE("unknown keys are rejected with their path") {
    bool thrown = false;
    try {
        (void)parse_config(minimal_config(R"("sim": { "widht": 100 })"));
    } catch (const ConfigError& e) {
        thrown = true;
        CHECK(std::string(e.what()).find("sim/widht") != std::string::npos);
    }
    CHECK(thrown);
    CHECK_THROWS_AS((void)parse_config(minimal_config(R"("unexpected": 1)")), ConfigError);
}

TEST_CASE("parse errors carry a line number") {
    bool thrown = false;
    try {
        (void)parse_config("{\n  \"version\": 1,\n  oops\n}");
    } catch (const ConfigError& e) {
        thrown = true;
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    CHECK(thrown);
}

TEST_CASE("wave spec wants exactly one of mu and gamma") {
    CHECK_THROWS_AS((void)parse_config(minimal_config(R"("wave": {})")), ConfigError);
    CHECK_THROWS_AS((void)parse_config(minimal_config(R"("wave": { "mu": 0.5, "gamma": 3.0 })")),
                    ConfigError);
    CHECK(parse_config(minimal_config(R"("wave": { "mu": 0.5 })")).wave.mu.has_value());
}

TEST_CASE("schema version is pinned") {
    CHECK_THROWS_AS((void)parse_config(R"({ "version": 2, "media": { "kind": "constant",
        "horizon": [0.0, 1.0] } })"),
                    ConfigError);
}

TEST_CASE("perturbations must keep the stability hypotheses") {
    CHECK_THROWS_AS((void)parse_config(minimal_config(
                        R"("stability": { "perturb_amplitude": 0.5, "perturb_decay": 0.0 })")),
                    ConfigError);
    // zero amplitude does not need a decaying tail
    CHECK_NOTHROW((void)parse_config(minimal_config(
        R"("stability": { "perturb_amplitude": 0.0, "perturb_decay": 0.0 })")));
}

// =============================================================================
// Wave resolution
// =============================================================================

TEST_CASE("gamma resolves to the small root and round-trips") {
    const auto cfg = parse_config(minimal_config(R"("wave": { "gamma": 3.0 })"));
    const auto path = build_media(cfg.media);
    const auto wave = resolve_wave(cfg.wave, path, cfg.analysis.least_mean_r);
    CHECK(wave.from_gamma);
    CHECK(wave.mu == doctest::Approx(0.38277021086578588).epsilon(1e-10));
    CHECK(envelope_speed(wave.mu, wave.a_bar) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("mu outside (0, mu_star) is rejected") {
    const auto cfg = parse_config(minimal_config(R"("wave": { "mu": 1.2 })"));
    const auto path = build_media(cfg.media);
    CHECK_THROWS_AS((void)resolve_wave(cfg.wave, path, 20.0), ConfigError);
}

TEST_CASE("gamma at the minimal speed is refused for front construction") {
    const auto cfg = parse_config(minimal_config(R"("wave": { "gamma": 2.0734446842053410 })"));
    const auto path = build_media(cfg.media);
    CHECK_THROWS_AS((void)resolve_wave(cfg.wave, path, 20.0), ConfigError);
}

// =============================================================================
// Commands
// =============================================================================

TEST_CASE("speedscan emits the calculus summary and flags bad gammas") {
    const auto cfg = parse_config(minimal_config(
        R"("speedscan": { "mu_lo": 0.001, "mu_hi": 20.0, "points": 64, "gammas": [3.0, 1.5] })"));
    RunOptions opt;
    opt.outdir = fresh_dir("speedscan");
    REQUIRE(cmd_speedscan(cfg, opt) == 0);

    const auto summary = nlohmann::json::parse(slurp(opt.outdir / "summary.json"));
    CHECK(summary["mu_star"].get<double>() == doctest::Approx(0.90710329357628993).epsilon(1e-9));
    CHECK(summary["c0"].get<double>() == doctest::Approx(2.0734446842053410).epsilon(1e-9));
    REQUIRE(summary["roots"].size() == 2);
    CHECK(summary["roots"][0]["ok"].get<bool>());
    CHECK_FALSE(summary["roots"][1]["ok"].get<bool>());

    const auto manifest = nlohmann::json::parse(slurp(opt.outdir / "manifest.json"));
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["outputs"].size() >= 3);
}

TEST_CASE("reruns are byte-identical") {
    const auto cfg = parse_config(minimal_config(
        R"("speedscan": { "mu_lo": 0.001, "mu_hi": 20.0, "points": 64, "gammas": [3.0] })"));
    RunOptions a, b;
    a.outdir = fresh_dir("det_a");
    b.outdir = fresh_dir("det_b");
    REQUIRE(cmd_speedscan(cfg, a) == 0);
    REQUIRE(cmd_speedscan(cfg, b) == 0);
    for (const char* f : {"envelope.csv", "summary.json", "media.csv", "schema.json"}) {
        CHECK(slurp(a.outdir / f) == slurp(b.outdir / f));
    }
}

TEST_CASE("validate passes on a healthy constant-medium config") {
    const auto cfg = parse_config(minimal_config(
        R"("validate": { "pairs": 8, "pair_t_end": 2.0, "residual_points": 60, "t_end": 5.0 },
           "wave": { "mu": 0.45 })"));
    RunOptions opt;
    opt.outdir = fresh_dir("validate_ok");
    CHECK(cmd_validate(cfg, opt) == 0);
    const auto report = nlohmann::json::parse(slurp(opt.outdir / "validate_report.json"));
    CHECK(report["all_pass"].get<bool>());
}

TEST_CASE("validate passes under every media kind") {
    const std::string kinds[] = {
        R"("kind": "periodic_sum", "horizon": [-30.0, 30.0], "offset": 1.0,
           "terms": [{ "amplitude": 0.5, "frequency": 1.0, "phase": -1.5707963267948966 }])",
        R"("kind": "telegraph", "horizon": [-30.0, 30.0], "low": 0.5, "high": 1.5)",
        R"("kind": "random_spline", "horizon": [-30.0, 30.0], "a_min": 0.4, "a_max": 1.8)",
    };
    int idx = 0;
    for (const auto& media : kinds) {
        const auto cfg = parse_config(R"({
          "version": 1,
          "media": { )" + media + R"( },
          "validate": { "pairs": 6, "pair_t_end": 2.0, "residual_points": 50, "t_end": 4.0 },
          "seeds": [11]
        })");
        RunOptions opt;
        opt.outdir = fresh_dir("validate_kind_" + std::to_string(idx++));
        CHECK(cmd_validate(cfg, opt) == 0);
    }
}

TEST_CASE("validate reports a designed instability as exit 5") {
    const auto cfg = parse_config(minimal_config(
        R"("validate": { "pairs": 4, "pair_t_end": 3.0, "residual_points": 20, "t_end": 5.0 },
           "sim": { "dt": 1.0 })"));
    RunOptions opt;
    opt.outdir = fresh_dir("validate_blowup");
    CHECK(cmd_validate(cfg, opt) == 5);
}

TEST_CASE("simulate smoke run writes its artifacts") {
    const auto cfg = parse_config(minimal_config(
        R"("simulate": { "t_end": 4.0, "snapshot_dt": 2.0,
                          "profile": { "kind": "step", "step_at": 0.0 },
                          "window": [-40, 80] },
           "wave": { "mu": 0.45 })"));
    RunOptions opt;
    opt.outdir = fresh_dir("simulate");
    REQUIRE(cmd_simulate(cfg, opt) == 0);
    CHECK(fs::exists(opt.outdir / "series.csv"));
    CHECK(fs::exists(opt.outdir / "snapshots.csv"));
    CHECK(fs::exists(opt.outdir / "schema.json"));
    const auto manifest = nlohmann::json::parse(slurp(opt.outdir / "manifest.json"));
    CHECK(manifest["status"] == "complete");
}

TEST_CASE("run_command maps errors to exit codes") {
    const auto cfg = parse_config(minimal_config(R"("wave": { "mu": 1.2 })"));
    RunOptions opt;
    opt.outdir = fresh_dir("badwave");
    CHECK(run_command("front", cfg, opt) == 2);   // mu outside (0, mu_star)
    CHECK(run_command("nonsense", cfg, opt) == 2);

    // horizon far too short for the tau ladder -> infeasible
    const auto cfg2 = parse_config(minimal_config(R"("wave": { "mu": 0.45 })"));
    CHECK(run_command("front", cfg2, opt) == 3);
}

TEST_CASE("envelope command emits the field with signed residuals") {
    const auto cfg = parse_config(R"({
      "version": 1,
      "media": { "kind": "periodic_sum", "horizon": [-20.0, 20.0], "offset": 1.0,
                 "terms": [{ "amplitude": 0.8, "frequency": 1.0, "phase": -1.5707963267948966 }] },
      "wave": { "mu": 0.5 },
      "envelope": { "y_window": [-8.0, 25.0], "dy": 0.5, "times": [0.0, 3.0, 7.0] }
    })");
    RunOptions opt;
    opt.outdir = fresh_dir("envelope");
    REQUIRE(cmd_envelope(cfg, opt) == 0);

    std::ifstream in(opt.outdir / "envelope_field.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,t,super,sub,residual_super,residual_sub");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        double x, t, hi, lo, rs, rb;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &x, &t, &hi, &lo, &rs,
                            &rb) == 6);
        CHECK(lo < hi + 1e-15);
        CHECK(hi <= 1.0);
        CHECK(rs >= -1e-6);
        if (!std::isnan(rb)) CHECK(rb <= 1e-6);
    }
    CHECK(rows == 3 * 67);
    const auto summary = nlohmann::json::parse(slurp(opt.outdir / "summary.json"));
    CHECK(summary["corrector_sup_norm"].get<double>() > 0.0);  // dipping medium works the corrector
}

TEST_CASE("front command emits ladder, tail, and stationarity artifacts") {
    const auto cfg = parse_config(R"({
      "version": 1,
      "media": { "kind": "periodic_sum", "horizon": [-30.0, 10.0], "offset": 1.0,
                 "terms": [{ "amplitude": 0.5, "frequency": 1.0, "phase": -1.5707963267948966 }] },
      "wave": { "mu": 0.45 },
      "sim": { "m": 2, "width": 500, "dt": 0.01 },
      "front": { "tau_ladder": [5.0, 10.0], "eval_times": [0.0, 1.0],
                 "y_window": [-15.0, 20.0], "dy": 0.5,
                 "stationarity_shift": 6.283185307179586, "stationarity_tau": 10.0 }
    })");
    RunOptions opt;
    opt.outdir = fresh_dir("front");
    opt.threads = 2;
    REQUIRE(cmd_front(cfg, opt) == 0);
    CHECK(fs::exists(opt.outdir / "profiles_tau5.csv"));
    CHECK(fs::exists(opt.outdir / "profiles_tau10.csv"));
    CHECK(fs::exists(opt.outdir / "cauchy.csv"));
    CHECK(fs::exists(opt.outdir / "tail_ratio.csv"));

    const auto mono = nlohmann::json::parse(slurp(opt.outdir / "monotonicity.json"));
    CHECK(mono["monotone_x_max_violation"].get<double>() <= 1e-10);
    CHECK(mono["monotone_tau_max_violation"].get<double>() <= 1e-8);
    CHECK(mono["sub_solution_max_violation"].get<double>() <= 1e-6);
    CHECK(mono["super_solution_max_violation"].get<double>() <= 1e-6);
    const auto stat = nlohmann::json::parse(slurp(opt.outdir / "stationarity.json"));
    CHECK(stat["sup_diff"].get<double>() < 1e-3);
}

TEST_CASE("stability command reports a contracting alpha series") {
    const auto cfg = parse_config(R"({
      "version": 1,
      "media": { "kind": "periodic_sum", "horizon": [-15.0, 22.0], "offset": 1.0,
                 "terms": [{ "amplitude": 0.5, "frequency": 1.0, "phase": -1.5707963267948966 }] },
      "wave": { "mu": 0.45 },
      "sim": { "m": 1, "width": 400 },
      "stability": { "t_end": 20.0, "perturb_amplitude": 0.5, "perturb_decay": 0.1,
                     "tau_build": 10.0 }
    })");
    RunOptions opt;
    opt.outdir = fresh_dir("stability");
    REQUIRE(cmd_stability(cfg, opt) == 0);
    const auto summary = nlohmann::json::parse(slurp(opt.outdir / "summary.json"));
    CHECK(summary["alpha_initial"].get<double>() >= summary["alpha_final"].get<double>());
    CHECK(summary["alpha_final"].get<double>() >= 1.0);
    CHECK(summary["alpha_monotonicity_violation"].get<double>() <= 1e-6);
    CHECK(fs::exists(opt.outdir / "alpha.csv"));
    CHECK(fs::exists(opt.outdir / "front_series.csv"));
}

TEST_CASE("spreading command runs the seed ensemble concurrently") {
    const auto cfg = parse_config(R"({
      "version": 1,
      "media": { "kind": "telegraph", "horizon": [0.0, 31.0], "low": 0.5, "high": 1.5,
                 "mean_holding_low": 2.0, "mean_holding_high": 2.0 },
      "spreading": { "t_end": 30.0, "support_halfwidth": 5, "support_height": 1.0,
                     "window_halfwidth": 140 },
      "seeds": [1, 2, 3]
    })");
    RunOptions opt;
    opt.outdir = fresh_dir("spreading");
    opt.threads = 3;
    REQUIRE(cmd_spreading(cfg, opt) == 0);
    for (int s : {1, 2, 3}) {
        CHECK(fs::exists(opt.outdir / ("flanks_seed" + std::to_string(s) + ".csv")));
    }
    const auto summary = nlohmann::json::parse(slurp(opt.outdir / "summary.json"));
    REQUIRE(summary["runs"].size() == 3);
    for (const auto& run : summary["runs"]) {
        CHECK(run["right_speed"].get<double>() > 0.5);
        CHECK(run["left_speed"].get<double>() > 0.5);
    }

    // seed override shrinks the ensemble to one member
    RunOptions ovr;
    ovr.outdir = fresh_dir("spreading_ovr");
    ovr.seed_override = 9;
    REQUIRE(cmd_spreading(cfg, ovr) == 0);
    CHECK(fs::exists(ovr.outdir / "flanks_seed9.csv"));
    CHECK_FALSE(fs::exists(ovr.outdir / "flanks_seed1.csv"));
}

TEST_CASE("fnv64 distinguishes file contents") {
    const auto dir = fresh_dir("fnv");
    std::ofstream(dir / "a.txt") << "hello";
    std::ofstream(dir / "b.txt") << "hellp";
    CHECK(fnv1a64_file(dir / "a.txt") != fnv1a64_file(dir / "b.txt"));
    CHECK(fnv1a64_file(dir / "a.txt") == fnv1a64_file(dir / "a.txt"));
}
