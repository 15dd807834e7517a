#include "latfront/dispersion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "latfront/errors.hpp"

namespace latfront {

namespace {

double coupling_gap(double mu) { return std::exp(mu) + std::exp(-mu) - 2.0; }

// d/dmu numerator of the envelope; strictly increasing in mu, one sign change.
double stationarity(double mu, double a_bar) {
    return mu * (std::exp(mu) - std::exp(-mu)) - (coupling_gap(mu) + a_bar);
}

}  // namespace

double envelope_speed(double mu, double a_bar) {
    if (!(mu > 0.0)) throw std::invalid_argument("envelope_speed: mu must be positive");
    return (coupling_gap(mu) + a_bar) / mu;
}

DispersionResult minimize_envelope(double a_bar, double tol) {
    if (!(a_bar > 0.0)) throw std::invalid_argument("minimize_envelope: a_bar must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_envelope: tol must be positive");

    double lo = 1e-6, hi = 50.0;
    if (!(stationarity(lo, a_bar) < 0.0 && stationarity(hi, a_bar) > 0.0))
        throw NumericsError("minimize_envelope: bracket [1e-6, 50] failed for a_bar=" +
                            std::to_string(a_bar));
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (stationarity(mid, a_bar) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    DispersionResult res;
    res.a_bar = a_bar;
    res.mu_star = 0.5 * (lo + hi);
    res.c0 = envelope_speed(res.mu_star, a_bar);
    res.tolerance = tol;
    res.residual = stationarity(res.mu_star, a_bar);
    return res;
}

SpeedRoots speed_roots(double gamma, double a_bar, double tol) {
    const DispersionResult d = minimize_envelope(a_bar, tol);
    const double slack = 1e-12 * std::max(1.0, std::abs(d.c0));
    if (gamma < d.c0 - slack) {
        throw std::domain_error(
            "speed_roots: gamma=" + std::to_string(gamma) + " is below the minimal speed c0=" +
            std::to_string(d.c0) + " (at gamma == c0 both roots coincide at mu_star)");
    }

    SpeedRoots roots;
    roots.gamma = gamma;
    if (gamma <= d.c0 + slack) {
        roots.mu_small = roots.mu_large = d.mu_star;
        roots.degenerate = true;
        return roots;
    }

    auto excess = [&](double mu) { return envelope_speed(mu, a_bar) - gamma; };

    // small root: envelope blows up like a_bar/mu as mu -> 0+
    double lo = d.mu_star;
    int guard = 0;
    while (excess(lo) <= 0.0) {
        lo *= 0.5;
        if (++guard > 4000) throw NumericsError("speed_roots: no lower bracket");
    }
    double hi = d.mu_star;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    roots.mu_small = 0.5 * (lo + hi);

    // large root: envelope grows without bound, geometric expansion terminates
    lo = d.mu_star;
    hi = 2.0 * d.mu_star;
    guard = 0;
    while (excess(hi) <= 0.0) {
        hi *= 2.0;
        if (++guard > 4000) throw NumericsError("speed_roots: no upper bracket");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    roots.mu_large = 0.5 * (lo + hi);
    return roots;
}

double instantaneous_speed(const MediaPath& path, double t, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("instantaneous_speed: mu must be positive");
    return (coupling_gap(mu) + path.evaluate(t)) / mu;
}

double front_displacement(const MediaPath& path, double mu, double t0, double t1) {
    if (!(mu > 0.0)) throw std::invalid_argument("front_displacement: mu must be positive");
    if (t0 > t1) throw std::invalid_argument("front_displacement: require t0 <= t1");
    return (coupling_gap(mu) * (t1 - t0) + path.integrate(t0, t1)) / mu;
}

double displacement_from_zero(const MediaPath& path, double mu, double t) {
    return t >= 0.0 ? front_displacement(path, mu, 0.0, t) : -front_displacement(path, mu, t, 0.0);
}

}  // namespace latfront
