#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "latfront/dispersion.hpp"
#include "latfront/media.hpp"

using namespace latfront;

// frozen by an independent high-precision bisection on the stationarity
// equation mu*(e^mu - e^-mu) = e^mu + e^-mu - 2 + a_bar
namespace {
constexpr double kMuStar1 = 0.90710329357628993;
constexpr double kC01 = 2.0734446842053410;
constexpr double kMuStar2 = 1.1996786402577338;
constexpr double kC02 = 3.0177591230766399;
constexpr double kRootSmall = 0.38277021086578588;  // a_bar=1, gamma=3
constexpr double kRootLarge = 1.8601806851921421;
constexpr double kEnv11 = 2.0861612696304876;  // e + 1/e - 1
}  // namespace

// =============================================================================
// Envelope
// =============================================================================

TEST_CASE("envelope values") {
    CHECK(envelope_speed(1.0, 1.0) == doctest::Approx(kEnv11).epsilon(1e-14));
    CHECK_THROWS_AS((void)envelope_speed(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)envelope_speed(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("envelope blows up like a_bar/mu for small mu") {
    double prev = envelope_speed(1e-1, 2.0);
    for (double mu : {3e-2, 1e-2, 3e-3, 1e-3}) {
        const double c = envelope_speed(mu, 2.0);
        CHECK(c > prev);
        prev = c;
    }
    CHECK(envelope_speed(1e-3, 2.0) * 1e-3 / 2.0 == doctest::Approx(1.0).epsilon(0.01));
}

// =============================================================================
// Minimizer
// =============================================================================

TEST_CASE("minimizer against the frozen bisection values") {
    const auto d = minimize_envelope(1.0);
    CHECK(d.mu_star == doctest::Approx(kMuStar1).epsilon(1e-11));
    CHECK(d.c0 == doctest::Approx(kC01).epsilon(1e-11));
    CHECK(std::abs(d.residual) < 1e-10);
    CHECK(envelope_speed(d.mu_star, 1.0) == doctest::Approx(d.c0).epsilon(1e-14));
    CHECK(envelope_speed(d.mu_star + 0.05, 1.0) > d.c0);
    CHECK(envelope_speed(d.mu_star - 0.05, 1.0) > d.c0);

    const auto d2 = minimize_envelope(2.0);
    CHECK(d2.mu_star == doctest::Approx(kMuStar2).epsilon(1e-11));
    CHECK(d2.c0 == doctest::Approx(kC02).epsilon(1e-11));
}

TEST_CASE("mu_star grows with a_bar") {
    double prev = 0.0;
    for (double a : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double ms = minimize_envelope(a).mu_star;
        CHECK(ms > prev);
        prev = ms;
    }
}

TEST_CASE("envelope is unimodal on a geometric grid") {
    const auto d = minimize_envelope(1.0);
    const int n = 400;
    const double lo = std::log(1e-3), hi = std::log(20.0);
    std::vector<double> mu(n), c(n);
    for (int i = 0; i < n; ++i) {
        mu[i] = std::exp(lo + (hi - lo) * i / (n - 1));
        c[i] = envelope_speed(mu[i], 1.0);
    }
    int minima = 0, argmin = 0;
    for (int i = 1; i + 1 < n; ++i) {
        if (c[i] < c[i - 1] && c[i] <= c[i + 1]) {
            ++minima;
            argmin = i;
        }
    }
    CHECK(minima == 1);
    CHECK(mu[argmin - 1] < d.mu_star);
    CHECK(mu[argmin + 1] > d.mu_star);
}

// =============================================================================
// Two-root inversion
// =============================================================================

TEST_CASE("speed roots against the frozen bisection values") {
    const auto r = speed_roots(3.0, 1.0);
    CHECK_FALSE(r.degenerate);
    CHECK(r.mu_small == doctest::Approx(kRootSmall).epsilon(1e-10));
    CHECK(r.mu_large == doctest::Approx(kRootLarge).epsilon(1e-10));
    CHECK(envelope_speed(r.mu_small, 1.0) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(envelope_speed(r.mu_large, 1.0) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("gamma at the minimum is the flagged tangency case") {
    const auto d = minimize_envelope(1.0);
    const auto r = speed_roots(d.c0, 1.0);
    CHECK(r.degenerate);
    CHECK(r.mu_small == doctest::Approx(d.mu_star).epsilon(1e-12));
    CHECK(r.mu_large == doctest::Approx(d.mu_star).epsilon(1e-12));
}

TEST_CASE("gamma below the minimum is rejected with a pointer to the tangency") {
    const auto d = minimize_envelope(1.0);
    bool thrown = false;
    try {
        (void)speed_roots(d.c0 - 0.1, 1.0);
    } catch (const std::domain_error& e) {
        thrown = true;
        CHECK(std::string(e.what()).find("coincide at mu_star") != std::string::npos);
    }
    CHECK(thrown);
}

TEST_CASE("root consistency over random levels") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double a_bar = 0.1 + 9.9 * unif(rng);
        const auto d = minimize_envelope(a_bar);
        const double gamma = d.c0 * (1.0 + 0.01 + 2.99 * unif(rng));
        const auto r = speed_roots(gamma, a_bar);
        CHECK(r.mu_small < d.mu_star);
        CHECK(r.mu_large > d.mu_star);
        CHECK(envelope_speed(r.mu_small, a_bar) == doctest::Approx(gamma).epsilon(1e-9));
        CHECK(envelope_speed(r.mu_large, a_bar) == doctest::Approx(gamma).epsilon(1e-9));
    }
}

// =============================================================================
// Instantaneous speed and displacement
// =============================================================================

TEST_CASE("instantaneous speed on realized media") {
    const auto one = build_media(MediaModel::constant(1.0, 0.0, 20.0));
    CHECK(instantaneous_speed(one, 7.3, 1.0) == doctest::Approx(kEnv11).epsilon(1e-13));

    const auto sine = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 20.0));
    const double expected = std::exp(1.0) + std::exp(-1.0) - 2.0 + 1.5;
    CHECK(instantaneous_speed(sine, std::acos(-1.0) / 2.0, 1.0) ==
          doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("windowed least mean of the speed matches the envelope at the media least mean") {
    const auto sine = build_media(MediaModel::sine(1.0, 0.5, 1.0, 0.0, 300.0));
    const double mu = 0.6;
    const auto rep = empirical_least_mean(sine, 60.0);
    // c(t) = (gap + a(t))/mu is an affine map of a; windowed infima map exactly
    const double gap = std::exp(mu) + std::exp(-mu) - 2.0;
    const double least_speed = (gap + rep.least_mean) / mu;
    CHECK(least_speed == doctest::Approx(envelope_speed(mu, rep.least_mean)).epsilon(1e-12));
    CHECK(least_speed <= envelope_speed(mu, 1.0));
    CHECK(least_speed >= envelope_speed(mu, 1.0) - 1.0 / (mu * 60.0) - 1e-6);
}

TEST_CASE("front displacement") {
    const auto one = build_media(MediaModel::constant(1.0, 0.0, 20.0));
    CHECK(front_displacement(one, 1.0, 0.0, 10.0) ==
          doctest::Approx(10.0 * kEnv11).epsilon(1e-12));
    CHECK(front_displacement(one, 1.0, 4.0, 4.0) == 0.0);
    CHECK_THROWS_AS((void)front_displacement(one, 1.0, 5.0, 4.0), std::invalid_argument);

    const auto sine = build_media(MediaModel::sine(1.0, 0.5, 1.0, -40.0, 40.0));
    SUBCASE("additive over subintervals") {
        CHECK(front_displacement(sine, 0.5, 0.0, 7.0) ==
              doctest::Approx(front_displacement(sine, 0.5, 0.0, 3.0) +
                              front_displacement(sine, 0.5, 3.0, 7.0))
                  .epsilon(1e-12));
    }
    SUBCASE("shift identity for the displacement") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> unif(0.0, 10.0);
        for (int k = 0; k < 20; ++k) {
            const double s = unif(rng), t = unif(rng);
            const double whole = front_displacement(sine, 0.5, 0.0, t + s);
            const double split = front_displacement(sine, 0.5, 0.0, s) +
                                 front_displacement(sine.shifted(s), 0.5, 0.0, t);
            CHECK(split == doctest::Approx(whole).epsilon(1e-11));
        }
    }
    SUBCASE("numerical derivative recovers the instantaneous speed") {
        const double h = 2.5e-3;
        for (double t : {1.1, 5.7, 13.3}) {
            const double slope =
                (displacement_from_zero(sine, 0.5, t + h) -
                 displacement_from_zero(sine, 0.5, t - h)) /
                (2.0 * h);
            CHECK(slope == doctest::Approx(instantaneous_speed(sine, t, 0.5)).epsilon(1e-4));
        }
    }
    SUBCASE("signed displacement is antisymmetric for even media") {
        CHECK(displacement_from_zero(sine, 0.5, -4.0) < 0.0);
        CHECK(displacement_from_zero(sine, 0.5, -4.0) ==
              doctest::Approx(-front_displacement(sine, 0.5, -4.0, 0.0)).epsilon(1e-14));
    }
}
