#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latfront/backprop.hpp"
#include "latfront/dispersion.hpp"
#include "latfront/front_analysis.hpp"
#include "latfront/lattice.hpp"
#include "latfront/media.hpp"

namespace latfront {

struct WaveSpec {
    std::optional<double> mu;
    std::optional<double> gamma;
};

struct AnalysisSpec {
    double lambda = 0.5;
    double tail_offset = 10.0;
    double tail_length = 10.0;
    double least_mean_r = 20.0;
    double alpha_behind = 50.0;
    double alpha_ahead = 20.0;
    double alpha_floor = 1e-12;
};

struct FrontSpec {
    std::vector<double> tau_ladder{10.0, 20.0, 40.0, 80.0};
    std::vector<double> eval_times{0.0, 3.141592653589793, 6.283185307179586};
    double y_lo = -30.0;
    double y_hi = 40.0;
    double dy = 0.25;
    double pad_behind = 12.0;
    double pad_ahead = 12.0;
    std::optional<double> stationarity_shift;  // default: one period when known
    double stationarity_tau = 80.0;
};

struct StabilitySpec {
    double t_end = 100.0;
    double perturb_amplitude = 0.5;
    double perturb_decay = 0.1;
    double tau_build = 40.0;
};

struct SpreadingSpec {
    double t_end = 100.0;
    long support_halfwidth = 5;
    double support_height = 1.0;
    long window_halfwidth = 300;
};

struct SpeedscanSpec {
    double mu_lo = 1e-3;
    double mu_hi = 20.0;
    int points = 200;
    std::vector<double> gammas;
};

struct EnvelopeSpec {
    double y_lo = -10.0;  // co-moving offsets x = D(t) + y
    double y_hi = 30.0;
    double dy = 0.5;
    std::vector<double> times{0.0, 2.0, 4.0};
    double fd_step = 1e-4;
};

struct ProfileSpec {
    std::string kind = "step";  // constant | step | compact | super
    double value = 0.5;         // constant level / compact height
    double step_at = 0.0;       // step: 1 left of this, 0 right
    long halfwidth = 5;         // compact support half-width (sites)
};

struct SimulateSpec {
    double t_end = 10.0;
    ProfileSpec profile;
    double snapshot_dt = 0.0;  // 0 = no snapshots
    long window_lo = -100;
    long window_hi = 100;
};

struct ValidateSpec {
    int pairs = 60;
    double pair_t_end = 5.0;
    int residual_points = 300;
    double t_end = 10.0;
};

struct SimSpec {
    int m = 1;
    long width = 800;
    double dt = 0.0;
    LeftBoundary left = LeftBoundary::Copy;
    double left_value = 0.0;
    RightBoundary right = RightBoundary::Geometric;
    double record_dt = 1.0;
    bool moving_window = true;
    double window_margin_frac = 0.25;
    double window_shift_frac = 0.25;

    SimConfig to_sim_config(double lambda) const;
};

struct Config {
    int version = 1;
    MediaModel media;
    std::optional<double> media_period;  // set for single-frequency periodic media
    WaveSpec wave;
    SimSpec sim;
    AnalysisSpec analysis;
    FrontSpec front;
    StabilitySpec stability;
    SpreadingSpec spreading;
    SpeedscanSpec speedscan;
    EnvelopeSpec envelope;
    SimulateSpec simulate;
    ValidateSpec validate;
    std::vector<std::uint64_t> seeds{42};
    std::string output_dir = "runs";

    nlohmann::json raw;  // resolved document (defaults filled), for the manifest
};

/// Parse + schema-validate a config document. Unknown keys are errors; the
/// message carries the JSON path (and the line for parse errors).
Config parse_config(const std::string& text, const std::string& origin = "<config>");
Config load_config(const std::filesystem::path& file);

struct ResolvedWave {
    double a_bar = 0.0;      // least mean in use
    double mu = 0.0;
    double gamma = 0.0;      // envelope speed at mu
    double mu_star = 0.0;
    double c0 = 0.0;
    bool from_gamma = false;
};

/// Least mean for gamma->mu resolution: analytic when the model admits one,
/// otherwise the empirical windowed estimate on the realized path.
double resolve_a_lower(const MediaPath& path, double least_mean_r);

/// Resolve the wave spec against a realized medium (exactly one of mu/gamma;
/// the gamma branch takes the small root; mu must land in (0, mu_star)).
ResolvedWave resolve_wave(const WaveSpec& wave, const MediaPath& path, double least_mean_r);

}  // namespace latfront
