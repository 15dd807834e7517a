#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "latfront/backprop.hpp"
#include "latfront/dispersion.hpp"
#include "latfront/envelopes.hpp"
#include "latfront/errors.hpp"
#include "latfront/lattice.hpp"

using namespace latfront;

namespace {
constexpr double kPi = 3.14159265358979323846;

SimConfig quiet_sim() {
    SimConfig s;
    s.moving_window = false;
    return s;
}
}  // namespace

// =============================================================================
// Initialization
// =============================================================================

TEST_CASE("init samples the profile on the window") {
    const auto s = init_from_profile([](double) { return 1.0; }, -5, 5, 1, 0.0);
    CHECK(s.size() == 11);
    CHECK(s.offset == -5);
    for (double v : s.u) CHECK(v == 1.0);
    CHECK(s.sup_bound == 1.0);

    const auto fine = init_from_profile([](double x) { return x < 0 ? 1.0 : 0.5; }, -4, 4, 2, 1.5);
    CHECK(fine.x_of(0) == -2.0);
    CHECK(fine.time == 1.5);

    CHECK_THROWS_AS((void)init_from_profile([](double x) { return x - 100.0; }, 0, 3, 1, 0.0),
                    std::invalid_argument);
}

// =============================================================================
// Stepping
// =============================================================================

TEST_CASE("equilibria are fixed points") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 10.0));
    auto zero = init_from_profile([](double) { return 0.0; }, -8, 8, 1, 0.0);
    auto one = init_from_profile([](double) { return 1.0; }, -8, 8, 1, 0.0);
    for (int k = 0; k < 25; ++k) {
        step(zero, path, 0.02, quiet_sim());
        step(one, path, 0.02, quiet_sim());
    }
    for (double v : zero.u) CHECK(v == 0.0);
    for (double v : one.u) CHECK(v == 1.0);
}

TEST_CASE("one homogeneous step reproduces the logistic to fifth order") {
    const auto path = build_media(MediaModel::constant(1.0, 0.0, 1.0));
    for (double dt : {0.02, 0.01, 0.005}) {
        auto s = init_from_profile([](double) { return 0.3; }, -4, 4, 1, 0.0);
        step(s, path, dt, quiet_sim());
        const double exact = homogeneous_oracle(0.3, path, dt);
        for (double v : s.u) CHECK(std::abs(v - exact) < 2.0 * std::pow(dt, 5));
    }
}

TEST_CASE("monotone profiles stay monotone over a step") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 5.0));
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> drops(41);
        double total = 0.0;
        for (auto& d : drops) total += (d = unif(rng));
        double level = 1.0;
        std::size_t idx = 0;
        auto s = init_from_profile(
            [&](double) {
                const double v = level;
                level -= drops[idx++] / total;
                return std::max(v, 0.0);
            },
            -20, 20, 1, 0.0);
        step(s, path, 0.03, quiet_sim());
        for (std::size_t k = 0; k + 1 < s.size(); ++k) CHECK(s.u[k + 1] <= s.u[k] + 1e-14);
    }
}

TEST_CASE("oversized steps are reported as instability") {
    const auto path = build_media(MediaModel::constant(1.5, 0.0, 40.0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.4);
    auto s = init_from_profile([&](double) { return unif(rng); }, -32, 32, 1, 0.0);
    auto cfg = quiet_sim();
    cfg.right = RightBoundary::Zero;
    CHECK_THROWS_AS(
        [&] {
            for (int k = 0; k < 40; ++k) step(s, path, 1.0, cfg);
        }(),
        IntegrationError);
}

// =============================================================================
// Evolution against the homogeneous oracle
// =============================================================================

TEST_CASE("homogeneous oracle closed forms") {
    const auto one = build_media(MediaModel::constant(1.0, 0.0, 10.0));
    CHECK(homogeneous_oracle(1.0, one, 7.0) == 1.0);
    CHECK(homogeneous_oracle(0.5, one, std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(homogeneous_oracle(2.0, one, std::log(2.0)) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)homogeneous_oracle(0.0, one, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)homogeneous_oracle(-0.5, one, 1.0), std::invalid_argument);
}

TEST_CASE("all-ones stays put over a long run") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 10.0));
    auto s = init_from_profile([](double) { return 1.0; }, -16, 16, 1, 0.0);
    evolve(s, path, 10.0, quiet_sim());
    for (double v : s.u) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("homogeneous evolution lands on the logistic value") {
    const auto path = build_media(MediaModel::constant(1.0, 0.0, 2.0));
    auto s = init_from_profile([](double) { return 0.5; }, -10, 10, 1, 0.0);
    auto cfg = quiet_sim();
    cfg.dt = 1e-3;
    evolve(s, path, std::log(3.0), cfg);
    for (double v : s.u) CHECK(std::abs(v - 0.75) < 1e-8);
}

TEST_CASE("homogeneous tracker boundary reproduces the oracle") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 6.0));
    auto s = init_from_profile([](double) { return 0.4; }, 0, 30, 1, 0.0);
    auto cfg = quiet_sim();
    cfg.left = LeftBoundary::HomogeneousTracker;  // tracker_u0 resolved from the left edge
    cfg.dt = 5e-3;
    evolve(s, path, 6.0, cfg);
    const double exact = homogeneous_oracle(0.4, path, 6.0);
    for (double v : s.u) CHECK(std::abs(v - exact) < 1e-7);
}

TEST_CASE("homogeneous run follows the oracle and conserves the logistic invariant") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 10.0));
    auto s = init_from_profile([](double) { return 0.5; }, -6, 6, 1, 0.0);
    auto cfg = quiet_sim();
    cfg.dt = 1e-3;
    cfg.record_dt = 0.5;
    const double q0 = 1.0 / 0.5 - 1.0;
    double drift = 0.0, dev = 0.0;
    evolve(s, path, 10.0, cfg, [&](const LatticeState& st) {
        const double q =
            (1.0 / st.u[3] - 1.0) * std::exp(path.integrate_from_zero(st.time));
        drift = std::max(drift, std::abs(q - q0));
        dev = std::max(dev, std::abs(st.u[3] - homogeneous_oracle(0.5, path, st.time)));
    });
    CHECK(drift < 1e-7);
    CHECK(dev < 1e-8);
}

// =============================================================================
// Comparison and continuity
// =============================================================================

TEST_CASE("ordered data stays ordered under every media kind") {
    std::vector<MediaPath> media;
    media.push_back(build_media(MediaModel::constant(1.0, 0.0, 6.0)));
    media.push_back(build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 6.0)));
    media.push_back(build_media(MediaModel::telegraph(0.5, 1.5, 2.0, 12, 0.0, 6.0)));
    media.push_back(build_media(MediaModel::random_spline(0.3, 2.0, 1.0, 12, 0.0, 6.0)));

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(0.0, 1.3);
    auto cfg = quiet_sim();
    cfg.right = RightBoundary::Zero;
    for (const auto& path : media) {
        for (int pair = 0; pair < 10; ++pair) {
            std::vector<double> f(33), g(33);
            for (std::size_t i = 0; i < f.size(); ++i) {
                f[i] = unif(rng);
                g[i] = unif(rng);
            }
            auto lo = init_from_profile(
                [&](double x) { return std::min(f[std::size_t(x + 16)], g[std::size_t(x + 16)]); },
                -16, 16, 1, 0.0);
            auto hi = init_from_profile(
                [&](double x) { return std::max(f[std::size_t(x + 16)], g[std::size_t(x + 16)]); },
                -16, 16, 1, 0.0);
            lo.sup_bound = hi.sup_bound = std::max(lo.sup_bound, hi.sup_bound);
            const double h = auto_dt(path.a_max(), hi.sup_bound);
            while (lo.time < 5.0) {
                step(lo, path, h, cfg);
                step(hi, path, h, cfg);
                for (std::size_t k = 0; k < lo.size(); ++k)
                    CHECK(lo.u[k] <= hi.u[k] + 1e-8);
            }
        }
    }
}

TEST_CASE("output differences shrink with the initial perturbation") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 3.0));
    auto base_profile = [](double x) { return 0.5 + 0.3 * std::sin(0.2 * x); };
    auto run = [&](double eps) {
        auto s = init_from_profile([&](double x) { return base_profile(x) + eps * std::cos(x); },
                                   -40, 40, 1, 0.0);
        evolve(s, path, 2.0, quiet_sim());
        return s;
    };
    const auto ref = run(0.0);
    double prev = 1e300;
    for (double eps : {0.1, 0.05, 0.025}) {
        const auto s = run(eps);
        double diff = 0.0;
        for (std::size_t k = 20; k + 20 < s.size(); ++k)
            diff = std::max(diff, std::abs(s.u[k] - ref.u[k]));
        CHECK(diff <= 0.62 * prev);
        prev = diff;
    }
}

// =============================================================================
// Fronts: domination, window policy
// =============================================================================

TEST_CASE("evolution from the exponential cap stays below it") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 30.0));
    const double mu = 0.45;
    SuperSolution cap(path, mu);
    auto s = init_from_profile([&](double x) { return cap(x, 0.0); }, -30, 90, 1, 0.0);
    auto cfg = quiet_sim();
    cfg.record_dt = 2.0;
    evolve(s, path, 20.0, cfg, [&](const LatticeState& st) {
        for (std::size_t k = 0; k < st.size(); ++k)
            CHECK(st.u[k] <= cap(st.x_of(k), st.time) + 1e-6);
    });
}

TEST_CASE("moving window tracks the front and logs shifts") {
    const auto path = build_media(MediaModel::constant(1.0, 0.0, 30.0));
    const double mu = 0.45;
    auto profile = [&](double x) { return std::min(1.0, std::exp(-mu * x)); };

    auto narrow = init_from_profile(profile, -40, 60, 1, 0.0);
    auto wide = init_from_profile(profile, -40, 160, 1, 0.0);
    auto moving = quiet_sim();
    moving.moving_window = true;
    const auto res = evolve(narrow, path, 25.0, moving);
    evolve(wide, path, 25.0, quiet_sim());

    CHECK(!res.shifts.empty());
    const auto x = level_crossing_rightmost(narrow, 0.5);
    REQUIRE(x.has_value());
    CHECK(narrow.x_right() - *x > 10.0);

    double diff = 0.0;
    for (std::size_t k = 0; k < narrow.size(); ++k) {
        const long i = narrow.offset + static_cast<long>(k);
        if (i > wide.offset + static_cast<long>(wide.size()) - 1) continue;
        diff = std::max(diff, std::abs(narrow.u[k] - wide.u[static_cast<std::size_t>(i - wide.offset)]));
    }
    CHECK(diff < 2e-5);
}

TEST_CASE("window shift helpers") {
    LatticeState s;
    s.offset = 0;
    s.m = 1;
    s.u = {1.0, 0.8, 0.4, 0.2, 0.1};
    s.sup_bound = 1.0;
    shift_window_right(s, 2);
    CHECK(s.offset == 2);
    REQUIRE(s.size() == 5);
    CHECK(s.u[0] == 0.4);
    CHECK(s.u[2] == 0.1);
    CHECK(s.u[3] == doctest::Approx(0.05));
    CHECK(s.u[4] == doctest::Approx(0.025));
}

// =============================================================================
// Back-propagation
// =============================================================================

TEST_CASE("back-propagated profiles are ordered, monotone, and sandwiched") {
    const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, -30.0, 10.0));
    const double mu = 0.45;
    BackPropConfig bp;
    bp.tau_ladder = {5.0, 10.0, 20.0};
    bp.eval_times = {0.0, 1.5};
    bp.y_lo = -20.0;
    bp.y_hi = 25.0;
    bp.m = 2;
    bp.width = 400;
    const auto result = back_propagate_front(path, mu, bp);
    REQUIRE(result.runs.size() == 3);

    // pointwise nonincreasing in tau on shared sites
    for (std::size_t k = 0; k + 1 < result.runs.size(); ++k) {
        for (std::size_t e = 0; e < bp.eval_times.size(); ++e) {
            const auto& sa = result.runs[k].snapshots[e];
            const auto& sb = result.runs[k + 1].snapshots[e];
            const long lo = std::max(sa.offset, sb.offset);
            const long hi = std::min(sa.offset + static_cast<long>(sa.size()),
                                     sb.offset + static_cast<long>(sb.size()));
            for (long i = lo; i < hi; ++i)
                CHECK(sb.u[std::size_t(i - sb.offset)] <=
                      sa.u[std::size_t(i - sa.offset)] + 1e-8);
        }
    }

    // monotone in x and squeezed between the envelopes
    const auto env = make_envelope(path, mu, minimize_envelope(1.0).mu_star, 1.0);
    const auto& deep = result.runs.back();
    for (std::size_t e = 0; e < deep.snapshots.size(); ++e) {
        const auto& snap = deep.snapshots[e];
        const double disp = displacement_from_zero(path, mu, snap.time);
        for (std::size_t k = 0; k + 1 < snap.size(); ++k) {
            const double y = snap.x_of(k) - disp;
            if (y < bp.y_lo || y > bp.y_hi) continue;
            CHECK(snap.u[k + 1] <= snap.u[k] + 1e-10);
            CHECK(snap.u[k] >= env.lower(snap.x_of(k), snap.time) - 1e-6);
            CHECK(snap.u[k] <= env.upper(snap.x_of(k), snap.time) + 1e-6);
        }
    }

    // Cauchy differences shrink along the ladder
    REQUIRE(result.cauchy.size() == 2 * bp.eval_times.size());
    for (std::size_t e = 0; e < bp.eval_times.size(); ++e) {
        CHECK(result.cauchy[e].sup_diff > result.cauchy[bp.eval_times.size() + e].sup_diff);
    }
}

TEST_CASE("back-propagation guards its inputs") {
    const auto path = build_media(MediaModel::constant(1.0, -5.0, 5.0));
    BackPropConfig bp;
    bp.tau_ladder = {20.0};  // horizon too short
    bp.eval_times = {0.0};
    CHECK_THROWS_AS((void)back_propagate_front(path, 0.45, bp), InfeasibleError);

    BackPropConfig tight;
    tight.tau_ladder = {4.0};
    tight.eval_times = {0.0};
    tight.width = 50;  // window budget too small
    CHECK_THROWS_AS((void)back_propagate_front(path, 0.45, tight), InfeasibleError);
}

TEST_CASE("stationarity check") {
    BackPropConfig bp;
    bp.tau_ladder = {10.0};
    bp.eval_times = {0.0};
    bp.y_lo = -15.0;
    bp.y_hi = 20.0;
    bp.m = 2;
    bp.width = 600;

    SUBCASE("zero shift is exact") {
        const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, -40.0, 10.0));
        CHECK(stationarity_check(path, 0.45, 0.0, 10.0, bp) == 0.0);
    }
    SUBCASE("constant media are shift-invariant") {
        const auto path = build_media(MediaModel::constant(1.0, -40.0, 10.0));
        CHECK(stationarity_check(path, 0.45, 2.3, 10.0, bp) < 1e-4);
    }
    SUBCASE("periodic media are invariant under one period") {
        const auto path = build_media(MediaModel::sine(1.0, 0.5, 1.0, -40.0, 10.0));
        CHECK(stationarity_check(path, 0.45, 2.0 * kPi, 10.0, bp) < 1e-4);
    }
}
