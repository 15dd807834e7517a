#pragma once

#include "latfront/media.hpp"

namespace latfront {

/// Speed envelope c(mu) = (e^mu + e^-mu - 2 + a_bar) / mu, mu > 0.
double envelope_speed(double mu, double a_bar);

struct DispersionResult {
    double a_bar = 0.0;
    double mu_star = 0.0;
    double c0 = 0.0;
    double tolerance = 0.0;
    double residual = 0.0;  // stationarity equation value at mu_star
};

/// Unique stationary point of the envelope, found by bracketing bisection on
/// mu*(e^mu - e^-mu) - (e^mu + e^-mu - 2 + a_bar) = 0 (strictly increasing).
DispersionResult minimize_envelope(double a_bar, double tol = 1e-13);

struct SpeedRoots {
    double gamma = 0.0;
    double mu_small = 0.0;  // in (0, mu_star]
    double mu_large = 0.0;  // in [mu_star, inf)
    bool degenerate = false;  // gamma == c0: both roots collapse to mu_star
};

/// Two-root inversion of the envelope at level gamma > c0. gamma == c0 is
/// accepted and flagged degenerate; gamma < c0 throws std::domain_error.
SpeedRoots speed_roots(double gamma, double a_bar, double tol = 1e-13);

/// c(t; mu) = (e^mu + e^-mu - 2 + a(t)) / mu for the realized medium.
double instantaneous_speed(const MediaPath& path, double t, double mu);

/// Integral of the instantaneous speed over [t0, t1], t0 <= t1.
double front_displacement(const MediaPath& path, double mu, double t0, double t1);

/// Signed displacement from time 0 to t (t may be negative).
double displacement_from_zero(const MediaPath& path, double mu, double t);

}  // namespace latfront
