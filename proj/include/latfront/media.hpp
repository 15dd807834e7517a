#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latfront/errors.hpp"

namespace latfront {

enum class MediaKind { Constant, PeriodicSum, Telegraph, RandomSpline };

const char* media_kind_name(MediaKind k);

struct PeriodicTerm {
    double amplitude = 0.0;
    double frequency = 1.0;
    double phase = 0.0;  // value contribution: amplitude * cos(frequency*t + phase)
};

/// Declarative description of a driving coefficient a(t). A model realizes to
/// one immutable MediaPath; same (kind, params, seed, horizon) gives a
/// bit-identical path.
struct MediaModel {
    MediaKind kind = MediaKind::Constant;
    double t_lo = 0.0;
    double t_hi = 1.0;
    double dt = 1e-2;  // sampling grid spacing
    std::uint64_t seed = 0;

    // constant
    double value = 1.0;

    // periodic_sum: offset + sum of cosine terms
    double offset = 1.0;
    std::vector<PeriodicTerm> terms;

    // telegraph: two-state switch, exponential holding times, linear ramps
    double low = 0.5;
    double high = 1.5;
    double mean_holding_low = 2.0;
    double mean_holding_high = 2.0;
    double ramp_width = 0.01;

    // random_spline: seeded nodes, smooth interpolation, clamped
    double a_min = 0.3;
    double a_max = 2.0;
    double node_spacing = 1.0;

    static MediaModel constant(double value, double t_lo, double t_hi, double dt = 1e-2);
    static MediaModel periodic(double offset, std::vector<PeriodicTerm> terms, double t_lo,
                               double t_hi, double dt = 1e-2);
    /// Convenience: offset + amplitude*sin(frequency*t), expressed as a cosine term.
    static MediaModel sine(double offset, double amplitude, double frequency, double t_lo,
                           double t_hi, double dt = 1e-2);
    static MediaModel telegraph(double low, double high, double mean_holding, std::uint64_t seed,
                                double t_lo, double t_hi, double dt = 1e-2,
                                double ramp_width = 1e-2);
    static MediaModel random_spline(double a_min, double a_max, double node_spacing,
                                    std::uint64_t seed, double t_lo, double t_hi,
                                    double dt = 1e-2);
};

/// A realized coefficient path on a uniform grid, linearly interpolated, with
/// an exact prefix integral and a shift offset implementing theta_s.
/// Immutable after construction; shifted copies share the sample storage.
class MediaPath {
public:
    /// Interpolated value at time t. Throws OutOfHorizonError outside the
    /// realized horizon; no extrapolation.
    double evaluate(double t) const;

    /// Time-shifted view: evaluate(shifted(s), t) == evaluate(*this, t + s).
    MediaPath shifted(double s) const;

    /// Integral of the interpolant over [s, t], s <= t. Exact for the
    /// piecewise-linear path (composite trapezoid), additive to round-off.
    double integrate(double s, double t) const;

    /// Signed integral from 0 to t (t may be negative).
    double integrate_from_zero(double t) const;

    double t_min() const;
    double t_max() const;
    double a_min() const;
    double a_max() const;
    double grid_dt() const;
    std::size_t node_count() const;
    double node_time(std::size_t i) const;   // in caller (shifted) time
    double node_value(std::size_t i) const;
    std::optional<double> analytic_mean() const;
    MediaKind kind() const;
    double base_shift() const { return base_shift_; }

    /// Test/data entry point: wrap explicit samples as a path.
    static MediaPath from_samples(double t0, double dt, std::vector<double> values, double a_min,
                                  double a_max,
                                  std::optional<double> analytic_mean = std::nullopt);

private:
    struct Realization;
    std::shared_ptr<const Realization> data_;
    double base_shift_ = 0.0;

    MediaPath(std::shared_ptr<const Realization> data, double base_shift);
    double value_at_grid_time(double tg) const;
    double prefix_at_grid_time(double tg) const;
    friend MediaPath build_media(const MediaModel&);
};

/// Realize a model. Throws ConfigError for invalid bounds/parameters.
MediaPath build_media(const MediaModel& model);

struct MeanReport {
    double least_mean = 0.0;
    double greatest_mean = 0.0;
    double window_floor = 0.0;  // r
    std::optional<double> analytic_mean;
};

/// Windowed mean scan: inf and sup over sample pairs (s,t) with t-s >= r of
/// the average of a over [s,t]. stride = 0 picks one automatically.
MeanReport empirical_least_mean(const MediaPath& path, double r, std::size_t stride = 0);

/// True iff all realized node values lie in [a_min, a_max] and a_min > 0.
bool verify_H(const MediaPath& path);

}  // namespace latfront
