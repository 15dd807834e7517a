#include "latfront/media.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace latfront {

namespace {

// 53-bit uniform in [0,1). mt19937_64 output is standardized, so paths are
// reproducible across platforms for a given seed.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential_sample(std::mt19937_64& rng, double mean) {
    return -mean * std::log1p(-uniform01(rng));
}

}  // namespace

const char* media_kind_name(MediaKind k) {
    switch (k) {
        case MediaKind::Constant: return "constant";
        case MediaKind::PeriodicSum: return "periodic_sum";
        case MediaKind::Telegraph: return "telegraph";
        case MediaKind::RandomSpline: return "random_spline";
    }
    return "?";
}

struct MediaPath::Realization {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;
    std::vector<double> prefix;  // prefix[i] = integral over [t0, t0 + i*dt]
    double a_min = 0.0;
    double a_max = 0.0;
    std::optional<double> analytic_mean;
    MediaKind kind = MediaKind::Constant;
};

MediaPath::MediaPath(std::shared_ptr<const Realization> data, double base_shift)
    : data_(std::move(data)), base_shift_(base_shift) {}

double MediaPath::t_min() const { return data_->t0 - base_shift_; }
double MediaPath::t_max() const {
    return data_->t0 + data_->dt * static_cast<double>(data_->values.size() - 1) - base_shift_;
}
double MediaPath::a_min() const { return data_->a_min; }
double MediaPath::a_max() const { return data_->a_max; }
double MediaPath::grid_dt() const { return data_->dt; }
std::size_t MediaPath::node_count() const { return data_->values.size(); }
double MediaPath::node_time(std::size_t i) const {
    return data_->t0 + data_->dt * static_cast<double>(i) - base_shift_;
}
double MediaPath::node_value(std::size_t i) const { return data_->values[i]; }
std::optional<double> MediaPath::analytic_mean() const { return data_->analytic_mean; }
MediaKind MediaPath::kind() const { return data_->kind; }

double MediaPath::value_at_grid_time(double tg) const {
    const auto& r = *data_;
    const double span = r.dt * static_cast<double>(r.values.size() - 1);
    const double slack = 1e-9 * r.dt;
    if (tg < r.t0 - slack || tg > r.t0 + span + slack) {
        throw OutOfHorizonError("media evaluation at t=" + std::to_string(tg - base_shift_) +
                                " outside realized horizon [" + std::to_string(t_min()) + ", " +
                                std::to_string(t_max()) + "]");
    }
    double s = (tg - r.t0) / r.dt;
    auto k = static_cast<std::ptrdiff_t>(std::floor(s));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(r.values.size()) - 2);
    const double theta = std::clamp(s - static_cast<double>(k), 0.0, 1.0);
    return r.values[k] + theta * (r.values[k + 1] - r.values[k]);
}

double MediaPath::prefix_at_grid_time(double tg) const {
    const auto& r = *data_;
    double s = (tg - r.t0) / r.dt;
    auto k = static_cast<std::ptrdiff_t>(std::floor(s));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(r.values.size()) - 2);
    const double tk = r.t0 + r.dt * static_cast<double>(k);
    // trapezoid of the linear interpolant over [tk, tg]: exact
    const double v = value_at_grid_time(tg);
    return r.prefix[k] + (tg - tk) * 0.5 * (r.values[k] + v);
}

double MediaPath::evaluate(double t) const { return value_at_grid_time(t + base_shift_); }

MediaPath MediaPath::shifted(double s) const { return MediaPath(data_, base_shift_ + s); }

double MediaPath::integrate(double s, double t) const {
    if (s > t) throw std::invalid_argument("integrate: require s <= t");
    // horizon check via evaluate (throws if outside)
    (void)evaluate(s);
    (void)evaluate(t);
    return prefix_at_grid_time(t + base_shift_) - prefix_at_grid_time(s + base_shift_);
}

double MediaPath::integrate_from_zero(double t) const {
    return t >= 0.0 ? integrate(0.0, t) : -integrate(t, 0.0);
}

MediaPath MediaPath::from_samples(double t0, double dt, std::vector<double> values, double a_min,
                                  double a_max, std::optional<double> analytic_mean) {
    if (dt <= 0.0 || values.size() < 2)
        throw ConfigError("from_samples: need dt > 0 and at least two samples");
    auto r = std::make_shared<Realization>();
    r->t0 = t0;
    r->dt = dt;
    r->values = std::move(values);
    r->a_min = a_min;
    r->a_max = a_max;
    r->analytic_mean = analytic_mean;
    r->prefix.resize(r->values.size());
    r->prefix[0] = 0.0;
    for (std::size_t i = 1; i < r->values.size(); ++i)
        r->prefix[i] = r->prefix[i - 1] + 0.5 * dt * (r->values[i - 1] + r->values[i]);
    return MediaPath(std::move(r), 0.0);
}

// ---------------------------------------------------------------------------
// model factories
// ---------------------------------------------------------------------------

MediaModel MediaModel::constant(double value, double t_lo, double t_hi, double dt) {
    MediaModel m;
    m.kind = MediaKind::Constant;
    m.value = value;
    m.t_lo = t_lo;
    m.t_hi = t_hi;
    m.dt = dt;
    return m;
}

MediaModel MediaModel::periodic(double offset, std::vector<PeriodicTerm> terms, double t_lo,
                                double t_hi, double dt) {
    MediaModel m;
    m.kind = MediaKind::PeriodicSum;
    m.offset = offset;
    m.terms = std::move(terms);
    m.t_lo = t_lo;
    m.t_hi = t_hi;
    m.dt = dt;
    return m;
}

MediaModel MediaModel::sine(double offset, double amplitude, double frequency, double t_lo,
                            double t_hi, double dt) {
    // sin(w t) = cos(w t - pi/2)
    return periodic(offset, {{amplitude, frequency, -std::acos(-1.0) / 2.0}}, t_lo, t_hi, dt);
}

MediaModel MediaModel::telegraph(double low, double high, double mean_holding, std::uint64_t seed,
                                 double t_lo, double t_hi, double dt, double ramp_width) {
    MediaModel m;
    m.kind = MediaKind::Telegraph;
    m.low = low;
    m.high = high;
    m.mean_holding_low = mean_holding;
    m.mean_holding_high = mean_holding;
    m.ramp_width = ramp_width;
    m.seed = seed;
    m.t_lo = t_lo;
    m.t_hi = t_hi;
    m.dt = dt;
    return m;
}

MediaModel MediaModel::random_spline(double a_min, double a_max, double node_spacing,
                                     std::uint64_t seed, double t_lo, double t_hi, double dt) {
    MediaModel m;
    m.kind = MediaKind::RandomSpline;
    m.a_min = a_min;
    m.a_max = a_max;
    m.node_spacing = node_spacing;
    m.seed = seed;
    m.t_lo = t_lo;
    m.t_hi = t_hi;
    m.dt = dt;
    return m;
}

// ---------------------------------------------------------------------------
// realization
// ---------------------------------------------------------------------------

namespace {

// Piecewise-linear skeleton sampled onto the uniform grid.
struct Skeleton {
    std::vector<double> t;
    std::vector<double> v;

    double at(double x) const {
        auto it = std::upper_bound(t.begin(), t.end(), x);
        if (it == t.begin()) return v.front();
        if (it == t.end()) return v.back();
        std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
        const double w = (x - t[k]) / (t[k + 1] - t[k]);
        return v[k] + w * (v[k + 1] - v[k]);
    }
};

}  // namespace

MediaPath build_media(const MediaModel& model) {
    if (!(model.t_lo < model.t_hi)) throw ConfigError("media horizon is empty");
    if (!(model.dt > 0.0)) throw ConfigError("media dt must be positive");

    const double span = model.t_hi - model.t_lo;
    const auto n_intervals =
        static_cast<std::size_t>(std::ceil(span / model.dt - 1e-9));
    const std::size_t n = std::max<std::size_t>(n_intervals, 1) + 1;

    std::vector<double> values(n);
    double a_min = 0.0, a_max = 0.0;
    std::optional<double> mean;

    auto node_t = [&](std::size_t i) { return model.t_lo + model.dt * static_cast<double>(i); };

    switch (model.kind) {
        case MediaKind::Constant: {
            if (!(model.value > 0.0)) throw ConfigError("constant media requires value > 0");
            std::fill(values.begin(), values.end(), model.value);
            a_min = a_max = model.value;
            mean = model.value;
            break;
        }
        case MediaKind::PeriodicSum: {
            double amp_sum = 0.0;
            for (const auto& term : model.terms) amp_sum += std::abs(term.amplitude);
            a_min = model.offset - amp_sum;
            a_max = model.offset + amp_sum;
            if (!(a_min > 0.0))
                throw ConfigError("periodic media violates (H): offset - sum|amplitude| <= 0");
            for (std::size_t i = 0; i < n; ++i) {
                double t = node_t(i), v = model.offset;
                for (const auto& term : model.terms)
                    v += term.amplitude * std::cos(term.frequency * t + term.phase);
                values[i] = v;
            }
            mean = model.offset;
            break;
        }
        case MediaKind::Telegraph: {
            if (!(model.low > 0.0) || !(model.low <= model.high))
                throw ConfigError("telegraph media requires 0 < low <= high");
            if (!(model.mean_holding_low > 0.0) || !(model.mean_holding_high > 0.0))
                throw ConfigError("telegraph mean holding times must be positive");
            if (!(model.ramp_width > 0.0))
                throw ConfigError("telegraph ramp_width must be positive");
            std::mt19937_64 rng(model.seed);
            const double w = model.ramp_width;
            bool is_high = (rng() & 1u) != 0;
            Skeleton sk;
            double t = model.t_lo;
            sk.t.push_back(t);
            sk.v.push_back(is_high ? model.high : model.low);
            while (t < model.t_hi + w) {
                // holds padded by the ramp width so adjacent ramps never overlap
                const double mean_hold =
                    is_high ? model.mean_holding_high : model.mean_holding_low;
                const double hold = w + exponential_sample(rng, mean_hold);
                const double s = t + hold;  // switch center
                sk.t.push_back(s - 0.5 * w);
                sk.v.push_back(is_high ? model.high : model.low);
                is_high = !is_high;
                sk.t.push_back(s + 0.5 * w);
                sk.v.push_back(is_high ? model.high : model.low);
                t = s;
            }
            for (std::size_t i = 0; i < n; ++i) values[i] = sk.at(node_t(i));
            a_min = model.low;
            a_max = model.high;
            if (model.mean_holding_low == model.mean_holding_high)
                mean = 0.5 * (model.low + model.high);
            break;
        }
        case MediaKind::RandomSpline: {
            if (!(model.a_min > 0.0) || !(model.a_min <= model.a_max))
                throw ConfigError("random_spline media requires 0 < a_min <= a_max");
            if (!(model.node_spacing > 0.0))
                throw ConfigError("random_spline node_spacing must be positive");
            std::mt19937_64 rng(model.seed);
            const double d = model.node_spacing;
            const double k0 = std::floor(model.t_lo / d) - 1.0;
            const auto nk = static_cast<std::size_t>(
                                std::ceil((model.t_hi - k0 * d) / d)) + 2;
            std::vector<double> knots(nk);
            for (auto& k : knots)
                k = model.a_min + (model.a_max - model.a_min) * uniform01(rng);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = node_t(i);
                double s = t / d - k0;
                auto k = static_cast<std::size_t>(std::floor(s));
                k = std::min(k, nk - 2);
                const double theta = s - static_cast<double>(k);
                // cosine blend: C^1, stays within the bracketing knot values
                const double c = 0.5 * (1.0 - std::cos(std::acos(-1.0) * theta));
                double v = knots[k] + c * (knots[k + 1] - knots[k]);
                values[i] = std::clamp(v, model.a_min, model.a_max);
            }
            a_min = model.a_min;
            a_max = model.a_max;
            break;
        }
    }

    auto path = MediaPath::from_samples(model.t_lo, model.dt, std::move(values), a_min, a_max, mean);
    // from_samples returns kind Constant; fix up the tag
    auto r = std::const_pointer_cast<MediaPath::Realization>(path.data_);
    r->kind = model.kind;
    return path;
}

// ---------------------------------------------------------------------------
// mean estimation and hypothesis check
// ---------------------------------------------------------------------------

MeanReport empirical_least_mean(const MediaPath& path, double r, std::size_t stride) {
    const double span = path.t_max() - path.t_min();
    if (!(r > 0.0)) throw std::invalid_argument("window floor r must be positive");
    if (span < 2.0 * r)
        throw std::invalid_argument("horizon too short for window floor r (need span >= 2r)");

    const std::size_t n = path.node_count();
    if (stride == 0) stride = std::max<std::size_t>(1, (n - 1) / 2000);

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);

    const double dt = path.grid_dt();
    // prefix integral re-derived from node values (shift-independent)
    std::vector<double> pre(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        pre[i] = pre[i - 1] + 0.5 * dt * (path.node_value(i - 1) + path.node_value(i));

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const double len = dt * static_cast<double>(idx[b] - idx[a]);
            if (len < r) continue;
            const double avg = (pre[idx[b]] - pre[idx[a]]) / len;
            lo = std::min(lo, avg);
            hi = std::max(hi, avg);
        }
    }
    if (!std::isfinite(lo))
        throw std::invalid_argument("no admissible window pair found (r too large for stride)");

    MeanReport rep;
    rep.least_mean = lo;
    rep.greatest_mean = hi;
    rep.window_floor = r;
    rep.analytic_mean = path.analytic_mean();
    return rep;
}

bool verify_H(const MediaPath& path) {
    if (!(path.a_min() > 0.0)) return false;
    const double slack = 1e-12 * std::max(1.0, std::abs(path.a_max()));
    for (std::size_t i = 0; i < path.node_count(); ++i) {
        const double v = path.node_value(i);
        if (v < path.a_min() - slack || v > path.a_max() + slack) return false;
    }
    return true;
}

}  // namespace latfront
