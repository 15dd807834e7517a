#include "latfront/backprop.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "latfront/dispersion.hpp"
#include "latfront/errors.hpp"

namespace latfront {

namespace {

// 4-point Catmull-Rom sample of a lattice state at fractional site position.
double sample_state(const LatticeState& s, double x) {
    const double pos = x * s.m - static_cast<double>(s.offset);
    const auto n = static_cast<std::ptrdiff_t>(s.u.size());
    auto k = static_cast<std::ptrdiff_t>(std::floor(pos));
    k = std::clamp<std::ptrdiff_t>(k, 1, n - 3);
    const double th = pos - static_cast<double>(k);
    const double p0 = s.u[k - 1], p1 = s.u[k], p2 = s.u[k + 1], p3 = s.u[k + 2];
    return p1 + 0.5 * th * (p2 - p0 +
                            th * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                  th * (3.0 * (p1 - p2) + p3 - p0)));
}

BackPropRun run_single_tau(const MediaPath& path, double mu, double tau,
                           const BackPropConfig& cfg) {
    const double t_start = -tau;
    const double t_last = cfg.eval_times.empty() ? t_start : cfg.eval_times.back();
    if (t_start < path.t_min() || t_last > path.t_max())
        throw InfeasibleError("back_propagate_front: media horizon does not cover [-tau=" +
                              std::to_string(t_start) + ", " + std::to_string(t_last) + "]");

    const double d0 = displacement_from_zero(path, mu, t_start);
    const double d1 = displacement_from_zero(path, mu, t_last);
    const long i_lo = static_cast<long>(std::floor((d0 + cfg.y_lo - cfg.pad_behind) * cfg.m));
    const long need_hi = static_cast<long>(std::ceil((d1 + cfg.y_hi + cfg.pad_ahead) * cfg.m));
    if (need_hi - i_lo + 1 > cfg.width)
        throw InfeasibleError("back_propagate_front: window budget " + std::to_string(cfg.width) +
                              " sites < required " + std::to_string(need_hi - i_lo + 1));
    const long i_hi = i_lo + cfg.width - 1;

    BackPropRun run;
    run.tau = tau;
    LatticeState state = init_from_profile(
        [&](double x) { return std::min(1.0, std::exp(-mu * (x - d0))); }, i_lo, i_hi, cfg.m,
        t_start);

    SimConfig sim = cfg.sim;
    sim.moving_window = false;  // window pre-sized to cover the whole run
    for (double te : cfg.eval_times) {
        evolve(state, path, te, sim);
        run.snapshots.push_back(state);

        ComovingProfile prof;
        prof.time = te;
        const double dt_disp = displacement_from_zero(path, mu, te);
        for (double y = cfg.y_lo; y <= cfg.y_hi + 1e-12; y += cfg.dy) {
            prof.y.push_back(y);
            prof.v.push_back(sample_state(state, y + dt_disp));
        }
        run.profiles.push_back(std::move(prof));
    }
    return run;
}

}  // namespace

BackPropResult back_propagate_front(const MediaPath& path, double mu, const BackPropConfig& cfg) {
    if (cfg.tau_ladder.empty()) throw std::invalid_argument("tau ladder is empty");
    if (!std::is_sorted(cfg.tau_ladder.begin(), cfg.tau_ladder.end()))
        throw std::invalid_argument("tau ladder must be increasing");
    if (!std::is_sorted(cfg.eval_times.begin(), cfg.eval_times.end()))
        throw std::invalid_argument("eval times must be increasing");
    if (!cfg.eval_times.empty() && cfg.eval_times.front() < -cfg.tau_ladder.front())
        throw std::invalid_argument("eval times must not precede -tau");

    BackPropResult result;
    result.runs.resize(cfg.tau_ladder.size());

    const int workers = std::max(1, cfg.threads);
    std::vector<std::exception_ptr> errors(cfg.tau_ladder.size());
    std::vector<std::thread> pool;
    std::size_t next = 0;
    auto work = [&](std::size_t k) {
        try {
            result.runs[k] = run_single_tau(path, mu, cfg.tau_ladder[k], cfg);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    if (workers == 1) {
        for (std::size_t k = 0; k < cfg.tau_ladder.size(); ++k) work(k);
    } else {
        std::mutex mx;
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t k;
                    {
                        std::lock_guard<std::mutex> lk(mx);
                        if (next >= cfg.tau_ladder.size()) return;
                        k = next++;
                    }
                    work(k);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Cauchy table on shared raw sites: ladder windows differ only by integer
    // site offsets, so the overlap needs no interpolation.
    for (std::size_t k = 0; k + 1 < result.runs.size(); ++k) {
        const auto& ra = result.runs[k];
        const auto& rb = result.runs[k + 1];
        for (std::size_t e = 0; e < cfg.eval_times.size(); ++e) {
            const auto& sa = ra.snapshots[e];
            const auto& sb = rb.snapshots[e];
            const double disp = displacement_from_zero(path, mu, cfg.eval_times[e]);
            const long lo = std::max(sa.offset, sb.offset);
            const long hi = std::min(sa.offset + static_cast<long>(sa.u.size()),
                                     sb.offset + static_cast<long>(sb.u.size()));
            double sup = 0.0;
            for (long i = lo; i < hi; ++i) {
                const double y = static_cast<double>(i) / cfg.m - disp;
                if (y < cfg.y_lo || y > cfg.y_hi) continue;
                const double da = sa.u[static_cast<std::size_t>(i - sa.offset)];
                const double db = sb.u[static_cast<std::size_t>(i - sb.offset)];
                sup = std::max(sup, std::abs(da - db));
            }
            result.cauchy.push_back({ra.tau, rb.tau, cfg.eval_times[e], sup});
        }
    }
    return result;
}

double stationarity_check(const MediaPath& path, double mu, double t_shift, double tau,
                          const BackPropConfig& cfg) {
    BackPropConfig one = cfg;
    one.threads = 1;

    one.tau_ladder = {tau};
    one.eval_times = {t_shift};
    const auto run1 = back_propagate_front(path, mu, one);

    one.tau_ladder = {tau + t_shift};
    one.eval_times = {0.0};
    const auto run2 = back_propagate_front(path.shifted(t_shift), mu, one);

    const auto& p1 = run1.runs[0].profiles[0];
    const auto& p2 = run2.runs[0].profiles[0];
    double sup = 0.0;
    for (std::size_t j = 0; j < p1.v.size(); ++j)
        sup = std::max(sup, std::abs(p1.v[j] - p2.v[j]));
    return sup;
}

}  // namespace latfront
