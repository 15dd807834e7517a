#pragma once

#include <vector>

#include "latfront/dispersion.hpp"
#include "latfront/media.hpp"

namespace latfront {

/// K(mu, mu_tilde) = [mu*(e^mt + e^-mt - 2) - mt*(e^mu + e^-mu - 2)] / (mt - mu),
/// the reaction-rate level the damped medium must dominate for the
/// sub-solution inequality. Requires 0 < mu < mu_tilde.
double threshold_K(double mu, double mu_tilde);

/// Bounded corrector A(t) <= 0 with (1-delta)*a(t) + A'(t) >= K pointwise on
/// every grid interval. Piecewise linear on the media realization grid.
struct Corrector {
    double delta = 0.0;
    double threshold = 0.0;  // K
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;      // A at grid nodes
    double sup_norm = 0.0;           // ||A||_inf
    double truncation_error = 0.0;   // vs. horizon shortened by its final 10%

    double value(double t) const;  // linear interpolation, clamped to the grid
};

/// Suffix-infimum construction of the corrector. a_lower is the least mean in
/// use; the precondition (1-delta)*a_lower > K is enforced (ConfigError).
Corrector build_corrector(const MediaPath& path, double mu, double mu_tilde, double delta,
                          double a_lower);

/// Smallest admissible sub-solution amplitude:
/// max{ e^{-(mt/mu-1)||A||} / (delta*(mt/mu-1)), e^{(mt/mu-1)||A||} },
/// which guarantees d*delta*(mt/mu-1)*e^{(mt/mu-1)A(t)} >= 1.
double d_min(const Corrector& corrector, double mu, double mu_tilde);

/// min{1, e^{-mu*(x - D(t))}} with D(t) the signed front displacement.
class SuperSolution {
public:
    SuperSolution(MediaPath path, double mu);

    double operator()(double x, double t) const;
    double unclamped(double x, double t) const;  // pure exponential branch
    double displacement(double t) const;
    double mu() const { return mu_; }
    const MediaPath& path() const { return path_; }

private:
    MediaPath path_;
    double mu_;
};

/// Two-exponential sub-solution, clamped at its crest:
///   tilde(x,t) = e^{-mu*xi} - d * e^{(mt/mu-1)A(t) - mt*xi},  xi = x - D(t),
/// and constant at the crest value for x <= crest(t).
class SubSolution {
public:
    SubSolution(MediaPath path, double mu, double mu_tilde, double d, Corrector corrector);

    double operator()(double x, double t) const;
    double tilde(double x, double t) const;
    /// argmax location x_omega(t) = D(t) + (ln d + ln mt - ln mu)/(mt-mu) + A(t)/mu
    double crest(double t) const;
    /// closed-form maximum value at the crest
    double crest_value(double t) const;
    double displacement(double t) const;

    double mu() const { return mu_; }
    double mu_tilde() const { return mu_tilde_; }
    double amplitude() const { return d_; }
    const Corrector& corrector() const { return corrector_; }
    const MediaPath& path() const { return path_; }

private:
    MediaPath path_;
    double mu_, mu_tilde_, d_;
    Corrector corrector_;
};

struct EnvelopePair {
    SuperSolution upper;
    SubSolution lower;
    double mu_star = 0.0;
    double a_lower = 0.0;
};

/// Default parameter policy: mu_tilde at the midpoint of (mu, min{2mu, mu_star}),
/// delta the largest of {0.2, 0.1, 0.05, 0.02, 0.01} with (1-delta)*a_lower > K,
/// d = d_min. Throws ConfigError when no delta in the menu qualifies.
EnvelopePair make_envelope(const MediaPath& path, double mu, double mu_star, double a_lower);

/// Discrete residual d/dt v - [v(x+1)+v(x-1)-2v(x) + a(t) v (1-v)] with the
/// time derivative replaced by a central difference of step h.
/// Super-solution: residual >= -tol everywhere. Sub-solution: residual <= tol
/// on the validity region x >= crest(t); outside it throws std::domain_error.
double residual_super(const SuperSolution& v, double x, double t, double h = 1e-4);
double residual_sub(const SubSolution& v, double x, double t, double h = 1e-4);

}  // namespace latfront
