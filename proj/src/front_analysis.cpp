#include "latfront/front_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latfront/dispersion.hpp"

namespace latfront {

std::optional<double> front_position(const LatticeState& state, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("front_position: lambda must lie in (0,1)");
    return level_crossing_rightmost(state, lambda);
}

double decay_rate(const LatticeState& state, double x_lo, double x_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < state.u.size(); ++k) {
        const double x = state.x_of(k);
        if (x < x_lo || x > x_hi) continue;
        if (!(state.u[k] > 0.0))
            throw std::invalid_argument("decay_rate: nonpositive value in fit window at x=" +
                                        std::to_string(x));
        const double y = -std::log(state.u[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("decay_rate: fewer than two sites in fit window");
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

SpeedEstimate least_mean_speed(const FrontSeries& series, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("least_mean_speed: r must be positive");
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < series.times.size(); ++i)
        if (std::isfinite(series.positions[i])) ok.push_back(i);
    if (ok.size() < 2) throw std::invalid_argument("least_mean_speed: series too short");
    const double span = series.times[ok.back()] - series.times[ok.front()];
    if (span < 2.0 * r)
        throw std::invalid_argument("least_mean_speed: series span must be at least 2r");

    SpeedEstimate est;
    est.least_mean = std::numeric_limits<double>::infinity();
    double st = 0, sp = 0, stt = 0, stp = 0;
    for (std::size_t a : ok) {
        st += series.times[a];
        sp += series.positions[a];
        stt += series.times[a] * series.times[a];
        stp += series.times[a] * series.positions[a];
    }
    const double n = static_cast<double>(ok.size());
    est.regression_slope = (n * stp - st * sp) / (n * stt - st * st);

    for (std::size_t ia = 0; ia < ok.size(); ++ia) {
        for (std::size_t ib = ia + 1; ib < ok.size(); ++ib) {
            const double dt = series.times[ok[ib]] - series.times[ok[ia]];
            if (dt < r) continue;
            est.least_mean = std::min(
                est.least_mean, (series.positions[ok[ib]] - series.positions[ok[ia]]) / dt);
        }
    }
    if (!std::isfinite(est.least_mean))
        throw std::invalid_argument("least_mean_speed: no recorded pair spans the window floor");
    return est;
}

AlphaResult alpha_ratio(const LatticeState& perturbed, const LatticeState& front, double floor,
                        long site_lo, long site_hi) {
    if (perturbed.m != front.m)
        throw std::invalid_argument("alpha_ratio: states use different strides");
    if (std::abs(perturbed.time - front.time) > 1e-9)
        throw std::invalid_argument("alpha_ratio: states are at different times");
    const long lo = std::max({perturbed.offset, front.offset, site_lo});
    const long hi = std::min({perturbed.offset + static_cast<long>(perturbed.u.size()) - 1,
                              front.offset + static_cast<long>(front.u.size()) - 1, site_hi});
    if (hi < lo) throw std::invalid_argument("alpha_ratio: empty comparison window");

    AlphaResult res;
    res.ratio_sup = -std::numeric_limits<double>::infinity();
    res.ratio_inf = std::numeric_limits<double>::infinity();
    for (long i = lo; i <= hi; ++i) {
        const double uf = front.u[static_cast<std::size_t>(i - front.offset)];
        if (!(uf >= floor))
            throw std::invalid_argument("alpha_ratio: reference front below floor at site " +
                                        std::to_string(i));
        const double ratio = perturbed.u[static_cast<std::size_t>(i - perturbed.offset)] / uf;
        res.ratio_sup = std::max(res.ratio_sup, ratio);
        res.ratio_inf = std::min(res.ratio_inf, ratio);
    }
    res.alpha = std::max({res.ratio_sup, 1.0 / res.ratio_inf, 1.0});
    return res;
}

SpreadingResult spreading_speed(const MediaPath& path, const SpreadingConfig& cfg,
                                double horizon) {
    LatticeState state = init_from_profile(
        [&](double x) {
            return std::abs(x) <= static_cast<double>(cfg.support_halfwidth) ? cfg.support_height
                                                                             : 0.0;
        },
        -cfg.window_halfwidth, cfg.window_halfwidth, 1, 0.0);

    SpreadingResult out;
    SimConfig sim = cfg.sim;
    sim.moving_window = false;
    evolve(state, path, horizon, sim, [&](const LatticeState& s) {
        out.times.push_back(s.time);
        const auto r = level_crossing_rightmost(s, cfg.lambda);
        const auto l = level_crossing_leftmost(s, cfg.lambda);
        out.right_positions.push_back(r ? *r : std::numeric_limits<double>::quiet_NaN());
        out.left_positions.push_back(l ? *l : std::numeric_limits<double>::quiet_NaN());
    });

    // difference quotient over the final half of the horizon
    auto at_time = [&](const std::vector<double>& xs, double t) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < out.times.size(); ++i)
            if (std::abs(out.times[i] - t) < std::abs(out.times[best] - t)) best = i;
        return std::pair<double, double>(out.times[best], xs[best]);
    };
    const auto [t1, xr1] = at_time(out.right_positions, horizon / 2.0);
    const auto [t2, xr2] = at_time(out.right_positions, horizon);
    const auto xl1 = at_time(out.left_positions, horizon / 2.0).second;
    const auto xl2 = at_time(out.left_positions, horizon).second;
    out.right_speed = (xr2 - xr1) / (t2 - t1);
    out.left_speed = (xl1 - xl2) / (t2 - t1);
    return out;
}

FrontSeries evolve_with_series(LatticeState& state, const MediaPath& path, double mu, double t_end,
                               const SimConfig& sim, const SeriesRecorderConfig& rec,
                               std::vector<WindowShift>* shifts) {
    FrontSeries series;
    auto recorder = [&](const LatticeState& s) {
        series.times.push_back(s.time);
        series.theoretical_positions.push_back(displacement_from_zero(path, mu, s.time));
        const auto x = level_crossing_rightmost(s, rec.lambda);
        series.positions.push_back(x ? *x : std::numeric_limits<double>::quiet_NaN());
        double fit = std::numeric_limits<double>::quiet_NaN();
        if (x) {
            try {
                fit = decay_rate(s, *x + rec.tail_offset, *x + rec.tail_offset + rec.tail_length);
            } catch (const std::invalid_argument&) {
                // tail left the window or hit zeros; recorded as NaN
            }
        }
        series.mu_hat.push_back(fit);
    };
    const EvolveResult res = evolve(state, path, t_end, sim, recorder);
    if (shifts) *shifts = res.shifts;
    return series;
}

}  // namespace latfront
