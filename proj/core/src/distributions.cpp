#include "qem/distributions.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qem/special_functions.hpp"
#include "qem/weibull_root.hpp"

namespace qem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

double clamp_to(double x, double lo, double hi) {
    return std::min(std::max(x, lo), hi);
}

// Cumulative hazard H(x) with F = 1 - exp(-H) for the nonnegative-support
// models. H(x <= 0) = 0.
double cum_hazard(const ModelParams& m, double x) {
    if (!(x > 0.0))
        return x == kInf ? kInf : 0.0;
    switch (m.tag()) {
        case ModelTag::exponential:
            return m.exponential().rate * x;
        case ModelTag::rayleigh: {
            const double b = m.rayleigh().scale;
            return 0.5 * (x / b) * (x / b);
        }
        case ModelTag::weibull:
            return m.weibull().rate * std::pow(x, m.weibull().shape);
        default:
            break;
    }
    throw std::logic_error("cum_hazard: not a nonnegative-support model");
}

// log(F(b) - F(a)) = -H(a) + log(1 - exp(-(H(b) - H(a)))) for hazard models.
double log_mass_from_hazard(double ha, double hb) {
    if (!(hb > ha))
        return -kInf;
    if (hb == kInf)
        return -ha;
    return -ha + std::log(-std::expm1(-(hb - ha)));
}

double laplace_log_mass(const LaplaceParams& p, double a, double b) {
    const double s = p.scale, mu = p.location;
    if (a >= mu) { // both ends in the upper exponential tail
        const double width = (b - a) / s; // inf when b is unbounded
        const double tail = width == kInf ? 0.0 : std::log(-std::expm1(-width));
        return -(a - mu) / s - std::numbers::ln2_v<double> + tail;
    }
    if (b <= mu) { // lower tail, mirror image
        const double width = (b - a) / s;
        const double tail = width == kInf ? 0.0 : std::log(-std::expm1(-width));
        return -(mu - b) / s - std::numbers::ln2_v<double> + tail;
    }
    // straddles the location: F(b)-F(a) = -(expm1(-(b-mu)/s) + expm1(-(mu-a)/s))/2
    const double up = (b - mu) / s;   // > 0, may be inf
    const double down = (mu - a) / s; // > 0, may be inf
    const double mass = -0.5 * (std::expm1(-up) + std::expm1(-down));
    return std::log(mass);
}

double normal_mass(const NormalParams& p, double a, double b) {
    const double za = a == -kInf ? -kInf : (a - p.location) / p.scale;
    const double zb = b == kInf ? kInf : (b - p.location) / p.scale;
    if (za >= 0.0)
        return norm_sf(za) - (zb == kInf ? 0.0 : norm_sf(zb));
    if (zb <= 0.0)
        return norm_cdf(zb) - (za == -kInf ? 0.0 : norm_cdf(za));
    return norm_cdf(zb) - norm_cdf(za);
}

} // namespace

double log_pdf(const ModelParams& m, double x) {
    switch (m.tag()) {
        case ModelTag::exponential: {
            const double lam = m.exponential().rate;
            if (x < 0.0)
                return -kInf;
            return std::log(lam) - lam * x;
        }
        case ModelTag::normal: {
            const auto& p = m.normal();
            const double z = (x - p.location) / p.scale;
            return -std::log(p.scale) - kLogSqrt2Pi - 0.5 * z * z;
        }
        case ModelTag::laplace: {
            const auto& p = m.laplace();
            return -std::log(2.0 * p.scale) - std::fabs(x - p.location) / p.scale;
        }
        case ModelTag::rayleigh: {
            const double b = m.rayleigh().scale;
            if (x <= 0.0)
                return -kInf;
            return std::log(x) - 2.0 * std::log(b) - 0.5 * (x / b) * (x / b);
        }
        case ModelTag::weibull: {
            const auto& p = m.weibull();
            if (x < 0.0)
                return -kInf;
            if (x == 0.0) {
                if (p.shape > 1.0) return -kInf;
                if (p.shape == 1.0) return std::log(p.rate);
                return kInf; // density pole at the origin for shape < 1
            }
            return std::log(p.rate) + std::log(p.shape) + (p.shape - 1.0) * std::log(x) -
                   p.rate * std::pow(x, p.shape);
        }
    }
    throw std::logic_error("unreachable");
}

double pdf(const ModelParams& m, double x) {
    return std::exp(log_pdf(m, x));
}

double cdf(const ModelParams& m, double x) {
    switch (m.tag()) {
        case ModelTag::exponential:
        case ModelTag::rayleigh:
        case ModelTag::weibull:
            return -std::expm1(-cum_hazard(m, x));
        case ModelTag::normal: {
            const auto& p = m.normal();
            if (x == -kInf) return 0.0;
            if (x == kInf) return 1.0;
            return norm_cdf((x - p.location) / p.scale);
        }
        case ModelTag::laplace: {
            const auto& p = m.laplace();
            if (x == -kInf) return 0.0;
            if (x == kInf) return 1.0;
            const double z = (x - p.location) / p.scale;
            return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
        }
    }
    throw std::logic_error("unreachable");
}

double quantile(const ModelParams& m, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("quantile requires p in (0,1)");
    switch (m.tag()) {
        case ModelTag::exponential:
            return -std::log1p(-p) / m.exponential().rate;
        case ModelTag::normal:
            return m.normal().location + m.normal().scale * norm_quantile(p);
        case ModelTag::laplace: {
            const auto& par = m.laplace();
            return p < 0.5 ? par.location + par.scale * std::log(2.0 * p)
                           : par.location - par.scale * std::log(2.0 * (1.0 - p));
        }
        case ModelTag::rayleigh:
            return m.rayleigh().scale * std::sqrt(-2.0 * std::log1p(-p));
        case ModelTag::weibull:
            return std::pow(-std::log1p(-p) / m.weibull().rate, 1.0 / m.weibull().shape);
    }
    throw std::logic_error("unreachable");
}

double log_interval_mass(const ModelParams& m, double lower, double upper) {
    if (!(upper > lower))
        return -kInf;
    switch (m.tag()) {
        case ModelTag::exponential:
        case ModelTag::rayleigh:
        case ModelTag::weibull:
            return log_mass_from_hazard(cum_hazard(m, lower), cum_hazard(m, upper));
        case ModelTag::laplace:
            return laplace_log_mass(m.laplace(), lower, upper);
        case ModelTag::normal: {
            const double mass = normal_mass(m.normal(), lower, upper);
            return mass > 0.0 ? std::log(mass) : -kInf;
        }
    }
    throw std::logic_error("unreachable");
}

TruncatedQuantileFn::TruncatedQuantileFn(const ModelParams& m, const IntervalObservation& obs)
    : tag_(m.tag()), a_(obs.lower), b_(obs.upper) {
    if (obs.is_exact())
        throw std::invalid_argument("truncated quantile of a degenerate interval");
    if (std::exp(log_interval_mass(m, a_, b_)) == 0.0)
        throw ZeroMassError("interval [" + std::to_string(a_) + ", " + std::to_string(b_) +
                            "] has zero probability mass");
    switch (tag_) {
        case ModelTag::exponential: {
            const double lam = m.exponential().rate;
            c0_ = lam;
            c1_ = std::expm1(-lam * (b_ - a_)); // -1 when b is unbounded
            break;
        }
        case ModelTag::weibull: {
            const auto& p = m.weibull();
            c0_ = p.rate;
            c1_ = p.shape;
            c2_ = a_ > 0.0 ? std::pow(a_, p.shape) : 0.0;
            const double hb = b_ == kInf ? kInf : p.rate * std::pow(b_, p.shape);
            c3_ = std::expm1(-(hb - p.rate * c2_));
            break;
        }
        case ModelTag::rayleigh: {
            const double beta = m.rayleigh().scale;
            c0_ = 2.0 * beta * beta;
            c1_ = a_ > 0.0 ? a_ * a_ : 0.0;
            const double hb = b_ == kInf ? kInf : b_ * b_ / c0_;
            c3_ = std::expm1(-(hb - c1_ / c0_));
            break;
        }
        case ModelTag::laplace: {
            const auto& p = m.laplace();
            c0_ = p.scale;
            c1_ = p.location;
            if (a_ >= p.location) {
                branch_ = 1;
                c2_ = std::expm1(-(b_ - a_) / p.scale);
            } else if (b_ <= p.location) {
                branch_ = 2;
                c2_ = std::expm1(-(b_ - a_) / p.scale);
            } else {
                branch_ = 3;
                c2_ = cdf(m, a_);
                c3_ = cdf(m, b_);
            }
            break;
        }
        case ModelTag::normal: {
            const auto& p = m.normal();
            c0_ = p.location;
            c1_ = p.scale;
            const double za = a_ == -kInf ? -kInf : (a_ - p.location) / p.scale;
            const double zb = b_ == kInf ? kInf : (b_ - p.location) / p.scale;
            if (za >= 0.0) {
                branch_ = 1; // work with upper tail masses
                c2_ = norm_sf(za);
                c3_ = zb == kInf ? 0.0 : norm_sf(zb);
            } else if (zb <= 0.0) {
                branch_ = 2; // lower tail masses
                c2_ = za == -kInf ? 0.0 : norm_cdf(za);
                c3_ = norm_cdf(zb);
            } else {
                branch_ = 3;
                c2_ = za == -kInf ? 0.0 : norm_cdf(za);
                c3_ = zb == kInf ? 1.0 : norm_cdf(zb);
            }
            break;
        }
    }
}

double TruncatedQuantileFn::operator()(double xi) const {
    if (!(xi > 0.0 && xi <= 1.0))
        throw std::invalid_argument("truncated quantile requires xi in (0,1)");
    if (xi == 1.0) {
        if (b_ == kInf)
            throw std::invalid_argument("xi = 1 undefined for an unbounded interval");
        return b_;
    }
    double q;
    switch (tag_) {
        case ModelTag::exponential:
            q = a_ - std::log1p(xi * c1_) / c0_;
            break;
        case ModelTag::weibull:
            q = std::pow(c2_ - std::log1p(xi * c3_) / c0_, 1.0 / c1_);
            break;
        case ModelTag::rayleigh:
            q = std::sqrt(c1_ - c0_ * std::log1p(xi * c3_));
            break;
        case ModelTag::laplace: {
            if (branch_ == 1) {
                q = a_ - c0_ * std::log1p(xi * c2_);
            } else if (branch_ == 2) {
                q = b_ + c0_ * std::log1p((1.0 - xi) * c2_);
            } else {
                const double p = (1.0 - xi) * c2_ + xi * c3_;
                q = p <= 0.5 ? c1_ + c0_ * std::log(2.0 * p)
                             : c1_ - c0_ * std::log(2.0 * (1.0 - p));
            }
            break;
        }
        case ModelTag::normal: {
            constexpr double kTiny = std::numeric_limits<double>::denorm_min();
            if (branch_ == 1) {
                const double tq = std::max((1.0 - xi) * c2_ + xi * c3_, kTiny);
                q = c0_ - c1_ * norm_quantile(tq);
            } else if (branch_ == 2) {
                const double lq = std::max((1.0 - xi) * c2_ + xi * c3_, kTiny);
                q = c0_ + c1_ * norm_quantile(lq);
            } else {
                const double p = (1.0 - xi) * c2_ + xi * c3_;
                q = c0_ + c1_ * norm_quantile(p);
            }
            break;
        }
        default:
            throw std::logic_error("unreachable");
    }
    return clamp_to(q, a_, b_);
}

double truncated_quantile(const ModelParams& m, const IntervalObservation& obs, double xi) {
    return TruncatedQuantileFn(m, obs)(xi);
}

double truncated_sample(const ModelParams& m, const IntervalObservation& obs, double u) {
    return TruncatedQuantileFn(m, obs)(u);
}

LogLikResult observed_loglik_detail(const ModelParams& m, const Dataset& dataset) {
    double total = 0.0;
    std::optional<std::size_t> flagged;
    const auto& obs = dataset.observations();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double contrib = obs[i].is_exact() ? log_pdf(m, obs[i].lower)
                                                 : log_interval_mass(m, obs[i].lower, obs[i].upper);
        if (contrib == -kInf && !flagged)
            flagged = i;
        total += contrib;
    }
    return {total, flagged};
}

double observed_loglik(const ModelParams& m, const Dataset& dataset) {
    return observed_loglik_detail(m, dataset).value;
}

double exp_interval_mean(double rate, double lower, double upper) {
    if (lower == upper)
        return lower;
    if (upper == kInf)
        return lower + 1.0 / rate;
    // A = a + 1/rate - (b-a)/expm1(rate*(b-a)): exact rearrangement of the
    // ratio form; expm1 keeps narrow intervals at full precision, and the
    // subtraction term vanishes gracefully as rate*(b-a) grows.
    const double width = upper - lower;
    return lower + 1.0 / rate - width / std::expm1(rate * width);
}

NormalIntervalMoments normal_interval_moments(double location, double scale,
                                              double lower, double upper) {
    if (lower == upper)
        return {lower, lower * lower};
    const NormalParams p{location, scale};
    const double mass = normal_mass(p, lower, upper);
    if (!(mass > 0.0))
        throw ZeroMassError("normal interval moments: zero-mass interval");
    const double za = lower == -kInf ? 0.0 : (lower - location) / scale;
    const double zb = upper == kInf ? 0.0 : (upper - location) / scale;
    const double phi_a = lower == -kInf ? 0.0 : norm_pdf(za);
    const double phi_b = upper == kInf ? 0.0 : norm_pdf(zb);
    // x*phi((x-mu)/sigma) -> 0 at infinite ends, so those terms drop.
    const double term_a = lower == -kInf ? 0.0 : (location + lower) * phi_a;
    const double term_b = upper == kInf ? 0.0 : (location + upper) * phi_b;
    double mean = location - scale * (phi_b - phi_a) / mass;
    mean = clamp_to(mean, lower, upper);
    const double second =
        location * location + scale * scale - scale * (term_b - term_a) / mass;
    return {mean, second};
}

EStepMoments exp_estep(double rate, const Dataset& dataset) {
    if (!(rate > 0.0))
        throw std::invalid_argument("exp_estep requires rate > 0");
    EStepMoments out;
    out.mean.reserve(dataset.size());
    for (const auto& o : dataset.observations())
        out.mean.push_back(exp_interval_mean(rate, o.lower, o.upper));
    return out;
}

EStepMoments normal_estep(double location, double scale, const Dataset& dataset) {
    if (!(scale > 0.0))
        throw std::invalid_argument("normal_estep requires scale > 0");
    EStepMoments out;
    out.mean.reserve(dataset.size());
    out.second_moment.reserve(dataset.size());
    for (const auto& o : dataset.observations()) {
        const auto m = normal_interval_moments(location, scale, o.lower, o.upper);
        out.mean.push_back(m.mean);
        out.second_moment.push_back(m.second_moment);
    }
    return out;
}

double exp_mstep(const EStepMoments& moments) {
    assert(!moments.mean.empty());
    const double total = pairwise_sum(moments.mean);
    assert(total > 0.0 && "conditional means must be positive on valid support");
    return static_cast<double>(moments.mean.size()) / total;
}

NormalParams normal_mstep(const EStepMoments& moments) {
    assert(!moments.mean.empty() && moments.mean.size() == moments.second_moment.size());
    const double n = static_cast<double>(moments.mean.size());
    const double mu = pairwise_sum(moments.mean) / n;
    const double variance = pairwise_sum(moments.second_moment) / n - mu * mu;
    if (!(variance > 0.0))
        throw DegenerateMStepError("normal M-step produced nonpositive variance");
    return {mu, std::sqrt(variance)};
}

LaplaceParams laplace_mstep(const SampleMatrix& samples) {
    assert(samples.rows > 0 && samples.cols > 0);
    std::vector<double> pooled = samples.data;
    const std::size_t nk = pooled.size();
    const std::size_t mid = nk / 2;
    std::nth_element(pooled.begin(), pooled.begin() + mid, pooled.end());
    double median = pooled[mid];
    if (nk % 2 == 0) {
        // even pooled count: midpoint of the two central order statistics
        const double below = *std::max_element(pooled.begin(), pooled.begin() + mid);
        median = 0.5 * (below + median);
    }
    std::vector<double> dev(nk);
    for (std::size_t j = 0; j < nk; ++j)
        dev[j] = std::fabs(samples.data[j] - median);
    const double scale = pairwise_sum(dev) / static_cast<double>(nk);
    if (!(scale > 0.0))
        throw DegenerateMStepError("laplace M-step produced zero scale");
    return {median, scale};
}

double rayleigh_mstep(const SampleMatrix& samples) {
    assert(samples.rows > 0 && samples.cols > 0);
    std::vector<double> sq(samples.data.size());
    for (std::size_t j = 0; j < sq.size(); ++j)
        sq[j] = samples.data[j] * samples.data[j];
    const double total = pairwise_sum(sq);
    return std::sqrt(total / (2.0 * static_cast<double>(samples.data.size())));
}

WeibullParams weibull_mstep(const SampleMatrix& samples) {
    const auto inputs = ShapeEquationInputs::from_samples(samples);
    const double shape = solve_beta(inputs);
    const double log_rate =
        std::log(static_cast<double>(inputs.count())) - log_power_sum(inputs, shape);
    return {std::exp(log_rate), shape};
}

} // namespace qem
