#include "qem/weibull_root.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qem/special_functions.hpp"

namespace qem {

namespace {

constexpr double kDegenerateSpread = 1e-12;

// Classic Brent bracketing: inverse quadratic / secant steps guarded by
// bisection. Assumes f(a) and f(b) have opposite signs.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb, double rel_tol) {
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 =
            2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * rel_tol * std::fabs(b);
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0)
            return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

} // namespace

ShapeEquationInputs ShapeEquationInputs::from_samples(const SampleMatrix& samples) {
    return from_values(std::span<const double>(samples.data));
}

ShapeEquationInputs ShapeEquationInputs::from_values(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("shape equation inputs are empty");
    std::vector<double> logs;
    logs.reserve(values.size());
    for (double q : values) {
        if (!(std::isfinite(q) && q > 0.0))
            throw std::invalid_argument("shape equation samples must be finite and > 0");
        logs.push_back(std::log(q));
    }
    std::sort(logs.begin(), logs.end());

    ShapeEquationInputs out;
    out.count_ = logs.size();
    out.log_max_ = logs.back();
    out.mean_log_ = pairwise_sum(logs) / static_cast<double>(logs.size());
    // run-length encode exact duplicates; grouped data collapses hard here
    for (std::size_t i = 0; i < logs.size();) {
        std::size_t j = i + 1;
        while (j < logs.size() && logs[j] == logs[i])
            ++j;
        out.log_values_.push_back(logs[i]);
        out.weights_.push_back(static_cast<double>(j - i));
        i = j;
    }
    return out;
}

bool ShapeEquationInputs::degenerate() const noexcept {
    return log_max_ - mean_log_ < kDegenerateSpread;
}

double g_of_beta(double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("g_of_beta requires beta > 0");
    return 1.0 / beta;
}

double h_of_beta(const ShapeEquationInputs& in, double beta) {
    // powers as exp(beta*(log q - log q_max)): the largest term is exactly 1
    double sw = 0.0, swl = 0.0;
    const auto logs = in.log_values();
    const auto w = in.weights();
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double e = w[i] * std::exp(beta * (logs[i] - in.log_max()));
        sw += e;
        swl += e * logs[i];
    }
    return swl / sw - in.mean_log();
}

double log_power_sum(const ShapeEquationInputs& in, double beta) {
    double sw = 0.0;
    const auto logs = in.log_values();
    const auto w = in.weights();
    for (std::size_t i = 0; i < logs.size(); ++i)
        sw += w[i] * std::exp(beta * (logs[i] - in.log_max()));
    return beta * in.log_max() + std::log(sw);
}

BetaBounds beta_bounds(const ShapeEquationInputs& in) {
    if (in.degenerate())
        throw NoUniqueRootError("shape equation has no unique root: all samples equal");
    // nK / sum(log q_max - log q) reduces to 1 / (log q_max - mean log q)
    const double lower = 1.0 / (in.log_max() - in.mean_log());
    const double h_low = h_of_beta(in, lower);
    if (!(h_low > 0.0))
        throw NoUniqueRootError("shape equation numerically degenerate at the lower bound");
    return {lower, 1.0 / h_low};
}

double solve_beta(const ShapeEquationInputs& in, double rel_tol) {
    const auto bounds = beta_bounds(in);
    auto f = [&in](double beta) { return g_of_beta(beta) - h_of_beta(in, beta); };
    const double fa = f(bounds.lower);
    if (fa <= 0.0)
        return bounds.lower; // sign violated only by roundoff: root at the bound
    const double fb = f(bounds.upper);
    if (fb >= 0.0)
        return bounds.upper;
    return brent_root(f, bounds.lower, bounds.upper, fa, fb, rel_tol);
}

} // namespace qem
