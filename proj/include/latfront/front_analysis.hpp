#pragma once

#include <optional>
#include <vector>

#include "latfront/lattice.hpp"
#include "latfront/media.hpp"

namespace latfront {

/// Recorded front observables. positions/mu_hat hold NaN where the window had
/// no crossing or no usable tail.
struct FrontSeries {
    std::vector<double> times;
    std::vector<double> positions;              // lambda-crossing, x units
    std::vector<double> mu_hat;                 // fitted tail exponent
    std::vector<double> theoretical_positions;  // signed displacement from 0
};

/// Rightmost downcrossing of lambda in (0,1); nullopt when absent.
std::optional<double> front_position(const LatticeState& state, double lambda);

/// Least-squares slope of -ln(u) versus x over sites with x in [x_lo, x_hi].
/// Throws std::invalid_argument on nonpositive values or an empty window.
double decay_rate(const LatticeState& state, double x_lo, double x_hi);

struct SpeedEstimate {
    double least_mean = 0.0;        // inf over recorded pairs with t-s >= r
    double regression_slope = 0.0;  // secondary estimate
};

/// Windowed least-mean speed of a recorded position series.
SpeedEstimate least_mean_speed(const FrontSeries& series, double r);

struct AlphaResult {
    double alpha = 1.0;
    double ratio_sup = 1.0;
    double ratio_inf = 1.0;
};

/// Two-sided ratio bound between a perturbed run and the reference front over
/// the shared window intersected with [site_lo, site_hi]. The reference must
/// stay above `floor` there.
AlphaResult alpha_ratio(const LatticeState& perturbed, const LatticeState& front, double floor,
                        long site_lo, long site_hi);

struct StabilityReport {
    std::vector<double> times;
    std::vector<double> alpha;
    std::vector<double> ratio_sup;
    std::vector<double> ratio_inf;
};

struct SpreadingConfig {
    long support_halfwidth = 5;
    double support_height = 1.0;
    long window_halfwidth = 300;  // sites either side of 0
    double lambda = 0.5;
    SimConfig sim;
};

struct SpreadingResult {
    std::vector<double> times;
    std::vector<double> right_positions;
    std::vector<double> left_positions;
    double right_speed = 0.0;  // difference quotient over the final half
    double left_speed = 0.0;
};

/// Evolve compactly supported data and track both lambda-crossings.
SpreadingResult spreading_speed(const MediaPath& path, const SpreadingConfig& cfg, double horizon);

/// Convenience recorder: evolve while collecting a FrontSeries (crossing,
/// theoretical displacement for the given mu, and tail fit on
/// [X + tail_offset, X + tail_offset + tail_length]).
struct SeriesRecorderConfig {
    double lambda = 0.5;
    double tail_offset = 10.0;
    double tail_length = 10.0;
};

FrontSeries evolve_with_series(LatticeState& state, const MediaPath& path, double mu, double t_end,
                               const SimConfig& sim, const SeriesRecorderConfig& rec,
                               std::vector<WindowShift>* shifts = nullptr);

}  // namespace latfront
