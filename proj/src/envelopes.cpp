#include "latfront/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "latfront/errors.hpp"

namespace latfront {

namespace {
double coupling_gap(double mu) { return std::exp(mu) + std::exp(-mu) - 2.0; }
}

double threshold_K(double mu, double mu_tilde) {
    if (!(mu > 0.0) || !(mu_tilde > mu))
        throw std::invalid_argument("threshold_K: require 0 < mu < mu_tilde");
    return (mu * coupling_gap(mu_tilde) - mu_tilde * coupling_gap(mu)) / (mu_tilde - mu);
}

double Corrector::value(double t) const {
    if (values.size() < 2) return 0.0;
    double s = (t - t0) / dt;
    auto k = static_cast<std::ptrdiff_t>(std::floor(s));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(values.size()) - 2);
    const double theta = std::clamp(s - static_cast<double>(k), 0.0, 1.0);
    return values[k] + theta * (values[k + 1] - values[k]);
}

namespace {

// Suffix-infimum corrector over the first n_nodes grid nodes.
//
// Increments use the per-interval minimum of a, so on every interval
//   A' >= -g_i = -( (1-delta)*min(a_i, a_{i+1}) - K )
// and hence (1-delta)*a(t) + A'(t) >= K pointwise, not just at midpoints
// (the realized a is linear inside each interval, so its interval minimum
// sits at an endpoint).
std::vector<double> suffix_corrector(const MediaPath& path, std::size_t n_nodes, double delta,
                                     double k_level) {
    const double dt = path.grid_dt();
    std::vector<double> g_int(n_nodes, 0.0);  // cumulative conservative integral
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
        const double g = (1.0 - delta) * std::min(path.node_value(i), path.node_value(i + 1)) -
                         k_level;
        g_int[i + 1] = g_int[i] + g * dt;
    }
    std::vector<double> a(n_nodes, 0.0);
    double suffix_min = g_int[n_nodes - 1];
    for (std::size_t i = n_nodes; i-- > 0;) {
        suffix_min = std::min(suffix_min, g_int[i]);
        a[i] = suffix_min - g_int[i];
    }
    return a;
}

}  // namespace

Corrector build_corrector(const MediaPath& path, double mu, double mu_tilde, double delta,
                          double a_lower) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("build_corrector: delta must lie in (0,1)");
    const double k_level = threshold_K(mu, mu_tilde);
    if (!((1.0 - delta) * a_lower > k_level)) {
        throw ConfigError(
            "corrector precondition failed: (1-delta)*a_lower <= K  "
            "(delta too large / mu_tilde too aggressive; delta=" +
            std::to_string(delta) + ", a_lower=" + std::to_string(a_lower) +
            ", K=" + std::to_string(k_level) + ")");
    }

    const std::size_t n = path.node_count();
    Corrector c;
    c.delta = delta;
    c.threshold = k_level;
    c.t0 = path.node_time(0);
    c.dt = path.grid_dt();
    c.values = suffix_corrector(path, n, delta, k_level);
    for (double v : c.values) c.sup_norm = std::max(c.sup_norm, -v);

    // finite-horizon sensitivity: rebuild with the final 10% dropped and
    // compare well inside the shared range
    const std::size_t n_trunc = std::max<std::size_t>(2, n - n / 10);
    const auto truncated = suffix_corrector(path, n_trunc, delta, k_level);
    const auto n_check = static_cast<std::size_t>(0.8 * static_cast<double>(n));
    for (std::size_t i = 0; i < std::min(n_check, n_trunc); ++i)
        c.truncation_error = std::max(c.truncation_error, std::abs(c.values[i] - truncated[i]));
    return c;
}

double d_min(const Corrector& corrector, double mu, double mu_tilde) {
    const double rho = mu_tilde / mu - 1.0;
    const double s = corrector.sup_norm;
    // least amplitude with d*delta*rho*e^{rho*A(t)} >= 1 for every A(t) in
    // [-||A||, 0]; nondecreasing in ||A||, and 1/(delta*rho) when A vanishes
    return std::max(std::exp(rho * s) / (corrector.delta * rho), std::exp(rho * s));
}

// ---------------------------------------------------------------------------
// super-solution
// ---------------------------------------------------------------------------

SuperSolution::SuperSolution(MediaPath path, double mu) : path_(std::move(path)), mu_(mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("SuperSolution: mu must be positive");
}

double SuperSolution::displacement(double t) const {
    return displacement_from_zero(path_, mu_, t);
}

double SuperSolution::unclamped(double x, double t) const {
    return std::exp(-mu_ * (x - displacement(t)));
}

double SuperSolution::operator()(double x, double t) const {
    return std::min(1.0, unclamped(x, t));
}

// ---------------------------------------------------------------------------
// sub-solution
// ---------------------------------------------------------------------------

SubSolution::SubSolution(MediaPath path, double mu, double mu_tilde, double d, Corrector corrector)
    : path_(std::move(path)), mu_(mu), mu_tilde_(mu_tilde), d_(d),
      corrector_(std::move(corrector)) {
    if (!(0.0 < mu && mu < mu_tilde && mu_tilde < 2.0 * mu))
        throw std::invalid_argument("SubSolution: require 0 < mu < mu_tilde < 2*mu");
    if (!(d >= d_min(corrector_, mu, mu_tilde) * (1.0 - 1e-12)))
        throw std::invalid_argument("SubSolution: amplitude d below d_min");
}

double SubSolution::displacement(double t) const {
    return displacement_from_zero(path_, mu_, t);
}

double SubSolution::tilde(double x, double t) const {
    const double xi = x - displacement(t);
    const double rho = mu_tilde_ / mu_ - 1.0;
    return std::exp(-mu_ * xi) - d_ * std::exp(rho * corrector_.value(t) - mu_tilde_ * xi);
}

double SubSolution::crest(double t) const {
    return displacement(t) +
           (std::log(d_) + std::log(mu_tilde_) - std::log(mu_)) / (mu_tilde_ - mu_) +
           corrector_.value(t) / mu_;
}

double SubSolution::crest_value(double t) const {
    const double a_t = corrector_.value(t);
    return std::exp(-mu_ * (std::log(d_) / (mu_tilde_ - mu_) + a_t / mu_)) *
           std::exp(-mu_ * (std::log(mu_tilde_) - std::log(mu_)) / (mu_tilde_ - mu_)) *
           (1.0 - mu_ / mu_tilde_);
}

double SubSolution::operator()(double x, double t) const {
    return x >= crest(t) ? tilde(x, t) : crest_value(t);
}

EnvelopePair make_envelope(const MediaPath& path, double mu, double mu_star, double a_lower) {
    if (!(mu > 0.0 && mu < mu_star))
        throw ConfigError("make_envelope: mu must lie in (0, mu_star)");
    const double upper = std::min(2.0 * mu, mu_star);
    const double mu_tilde = 0.5 * (mu + upper);

    const double k_level = threshold_K(mu, mu_tilde);
    double delta = 0.0;
    for (double cand : {0.2, 0.1, 0.05, 0.02, 0.01}) {
        if ((1.0 - cand) * a_lower > k_level) {
            delta = cand;
            break;
        }
    }
    if (delta == 0.0)
        throw ConfigError("make_envelope: no admissible delta in {0.2,...,0.01}; "
                          "(1-delta)*a_lower <= K for all menu values");

    Corrector corr = build_corrector(path, mu, mu_tilde, delta, a_lower);
    const double d = d_min(corr, mu, mu_tilde);
    return EnvelopePair{SuperSolution(path, mu), SubSolution(path, mu, mu_tilde, d, corr),
                        mu_star, a_lower};
}

// ---------------------------------------------------------------------------
// residuals
// ---------------------------------------------------------------------------

namespace {

template <typename F>
double lattice_residual(const F& v, const MediaPath& path, double x, double t, double h) {
    const double dudt = (v(x, t + h) - v(x, t - h)) / (2.0 * h);
    const double center = v(x, t);
    const double hop = v(x + 1.0, t) + v(x - 1.0, t) - 2.0 * center;
    const double a = path.evaluate(t);
    return dudt - (hop + a * center * (1.0 - center));
}

}  // namespace

double residual_super(const SuperSolution& v, double x, double t, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("residual_super: h must be positive");
    return lattice_residual([&](double xx, double tt) { return v(xx, tt); }, v.path(), x, t, h);
}

double residual_sub(const SubSolution& v, double x, double t, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("residual_sub: h must be positive");
    if (x < v.crest(t))
        throw std::domain_error("residual_sub: x is left of the crest x_omega(t); "
                                "the defining inequality only applies for x >= x_omega(t)");
    return lattice_residual([&](double xx, double tt) { return v(xx, tt); }, v.path(), x, t, h);
}

}  // namespace latfront
