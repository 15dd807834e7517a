#include "latfront/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latfront/errors.hpp"

namespace latfront {

double auto_dt(double a_max, double sup_bound) {
    // discrete Laplacian eigenvalues lie in [-4, 0]; add the reaction bound
    return std::min(0.1, 0.2 / (4.0 + a_max * std::max(1.0, sup_bound)));
}

LatticeState init_from_profile(const std::function<double(double)>& profile, long i_lo, long i_hi,
                               int m, double t0) {
    if (m < 1) throw std::invalid_argument("init_from_profile: m must be >= 1");
    if (i_hi < i_lo) throw std::invalid_argument("init_from_profile: empty window");
    LatticeState s;
    s.offset = i_lo;
    s.m = m;
    s.time = t0;
    s.u.resize(static_cast<std::size_t>(i_hi - i_lo + 1));
    double umax = 0.0;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
        const double v = profile(s.x_of(k));
        if (v < 0.0)
            throw std::invalid_argument("init_from_profile: negative profile value at x=" +
                                        std::to_string(s.x_of(k)));
        s.u[k] = v;
        umax = std::max(umax, v);
    }
    s.sup_bound = std::max(1.0, umax);
    return s;
}

namespace {

struct Ghosts {
    double left = 0.0;
    double ratio_right = 0.0;  // geometric decay ratio per site
    double right_base = 0.0;
};

Ghosts make_ghosts(const std::vector<double>& w, const MediaPath& path, double t,
                   const SimConfig& cfg) {
    Ghosts g;
    switch (cfg.left) {
        case LeftBoundary::Copy: g.left = w.front(); break;
        case LeftBoundary::Fixed: g.left = cfg.left_value; break;
        case LeftBoundary::HomogeneousTracker:
            if (!(cfg.tracker_u0 > 0.0))
                throw std::invalid_argument("homogeneous tracker boundary requires tracker_u0 > 0");
            g.left = homogeneous_oracle(cfg.tracker_u0, path, t);
            break;
    }
    const std::size_t n = w.size();
    if (cfg.right == RightBoundary::Geometric && n >= 2 && w[n - 2] > 1e-300) {
        g.right_base = w[n - 1];
        g.ratio_right = w[n - 1] / w[n - 2];
    }
    return g;
}

// du_i = u_{i+m} + u_{i-m} - 2 u_i + a u_i (1 - u_i)
void rhs(const std::vector<double>& w, std::vector<double>& out, int m, double a,
         const Ghosts& g) {
    const auto n = static_cast<std::ptrdiff_t>(w.size());
    const auto mm = static_cast<std::ptrdiff_t>(m);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double below = (i - mm >= 0) ? w[i - mm] : g.left;
        double above;
        if (i + mm < n) {
            above = w[i + mm];
        } else if (g.ratio_right > 0.0) {
            above = g.right_base * std::pow(g.ratio_right, static_cast<double>(i + mm - n + 1));
        } else {
            above = 0.0;
        }
        out[i] = above + below - 2.0 * w[i] + a * w[i] * (1.0 - w[i]);
    }
}

}  // namespace

void step(LatticeState& state, const MediaPath& path, double dt, const SimConfig& config) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const std::size_t n = state.u.size();
    const double t = state.time;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), w(n);

    auto eval = [&](const std::vector<double>& src, double ts, std::vector<double>& out) {
        rhs(src, out, state.m, path.evaluate(ts), make_ghosts(src, path, ts, config));
    };

    eval(state.u, t, k1);
    for (std::size_t i = 0; i < n; ++i) w[i] = state.u[i] + 0.5 * dt * k1[i];
    eval(w, t + 0.5 * dt, k2);
    for (std::size_t i = 0; i < n; ++i) w[i] = state.u[i] + 0.5 * dt * k2[i];
    eval(w, t + 0.5 * dt, k3);
    for (std::size_t i = 0; i < n; ++i) w[i] = state.u[i] + dt * k3[i];
    eval(w, t + dt, k4);

    constexpr double eps_pos = 1e-10;
    for (std::size_t i = 0; i < n; ++i) {
        double v = state.u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(v) || v < -eps_pos || v > state.sup_bound + eps_pos) {
            throw IntegrationError("stability violation at t=" + std::to_string(t + dt) + ", x=" +
                                   std::to_string(state.x_of(i)) + ", u=" + std::to_string(v) +
                                   "; reduce dt");
        }
        state.u[i] = v < 0.0 ? 0.0 : v;
    }
    state.time = t + dt;
}

std::optional<double> level_crossing_rightmost(const LatticeState& state, double lambda) {
    const auto n = state.u.size();
    if (n < 2) return std::nullopt;
    for (std::size_t k = n - 1; k-- > 0;) {
        if (state.u[k] >= lambda && state.u[k + 1] < lambda) {
            const double frac = (state.u[k] - lambda) / (state.u[k] - state.u[k + 1]);
            return state.x_of(k) + frac / state.m;
        }
    }
    return std::nullopt;
}

std::optional<double> level_crossing_leftmost(const LatticeState& state, double lambda) {
    for (std::size_t k = 0; k + 1 < state.u.size(); ++k) {
        if (state.u[k] < lambda && state.u[k + 1] >= lambda) {
            const double frac = (lambda - state.u[k]) / (state.u[k + 1] - state.u[k]);
            return state.x_of(k) + frac / state.m;
        }
    }
    return std::nullopt;
}

long window_shift_demand(const LatticeState& state, const SimConfig& config) {
    const auto x = level_crossing_rightmost(state, config.lambda);
    if (!x) return 0;
    const double width_x = state.x_right() - state.x_left();
    if (state.x_right() - *x >= config.window_margin_frac * width_x) return 0;
    const auto n = static_cast<long>(state.u.size());
    const long shift = std::max<long>(
        1, std::lround(config.window_shift_frac * static_cast<double>(n)));
    return shift < n ? shift : 0;
}

void shift_window_right(LatticeState& state, long sites) {
    const auto n = state.u.size();
    if (sites <= 0 || static_cast<std::size_t>(sites) >= n) return;
    const auto shift = static_cast<std::size_t>(sites);

    double ratio = 0.0;
    if (state.u[n - 2] > 1e-300) ratio = state.u[n - 1] / state.u[n - 2];

    std::rotate(state.u.begin(), state.u.begin() + static_cast<std::ptrdiff_t>(shift),
                state.u.end());
    double tail = state.u[n - shift - 1];
    for (std::size_t k = n - shift; k < n; ++k) {
        tail *= ratio;
        state.u[k] = tail;
    }
    state.offset += sites;
}

EvolveResult evolve(LatticeState& state, const MediaPath& path, double t_end,
                    const SimConfig& config,
                    const std::function<void(const LatticeState&)>& recorder) {
    if (t_end < state.time) throw std::invalid_argument("evolve: t_end before current time");

    SimConfig cfg = config;
    if (cfg.dt <= 0.0) cfg.dt = auto_dt(path.a_max(), state.sup_bound);
    if (cfg.left == LeftBoundary::HomogeneousTracker && cfg.tracker_u0 <= 0.0)
        cfg.tracker_u0 = state.u.front();

    EvolveResult result;
    if (recorder) recorder(state);

    const double t0 = state.time;
    double next_record = t0 + cfg.record_dt;
    while (state.time < t_end - 1e-12) {
        const double stop = std::min(t_end, next_record);
        while (state.time < stop - 1e-12) {
            const double h = std::min(cfg.dt, stop - state.time);
            step(state, path, h, cfg);
            ++result.steps;
            if (cfg.moving_window) {
                const long demand = window_shift_demand(state, cfg);
                if (demand > 0) {
                    shift_window_right(state, demand);
                    result.shifts.push_back({state.time, demand});
                }
            }
        }
        state.time = stop;  // absorb round-off drift at the record point
        if (recorder) recorder(state);
        next_record = stop + cfg.record_dt;
    }
    return result;
}

double homogeneous_oracle(double u0, const MediaPath& path, double t) {
    if (!(u0 > 0.0)) throw std::invalid_argument("homogeneous_oracle: u0 must be positive");
    const double denom = 1.0 + (1.0 / u0 - 1.0) * std::exp(-path.integrate_from_zero(t));
    if (!(denom > 0.0))
        throw std::domain_error("homogeneous_oracle: backward blow-up (denominator <= 0)");
    return 1.0 / denom;
}

}  // namespace latfront
