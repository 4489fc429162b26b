#pragma once

#include <optional>
#include <vector>

#include "qem/errors.hpp"
#include "qem/interval_data.hpp"
#include "qem/model.hpp"
#include "qem/sample_matrix.hpp"

namespace qem {

double pdf(const ModelParams& model, double x);

/// log f(x); -inf outside the support.
double log_pdf(const ModelParams& model, double x);

/// Extended-real argument: cdf(-inf) = 0, cdf(+inf) = 1.
double cdf(const ModelParams& model, double x);

/// Inverse CDF on the full support, p in (0,1).
double quantile(const ModelParams& model, double p);

/// Stable log(F(upper) - F(lower)); -inf when the mass underflows.
double log_interval_mass(const ModelParams& model, double lower, double upper);

/// Inverse of the interval-truncated CDF: the q in (lower, upper) with
/// (F(q) - F(a)) / (F(b) - F(a)) = xi, in closed form per model.
/// xi = 1 is accepted for bounded intervals only (returns the upper end).
/// Throws ZeroMassError when the interval mass underflows and
/// std::invalid_argument for degenerate intervals or xi outside range.
double truncated_quantile(const ModelParams& model, const IntervalObservation& obs, double xi);

/// Inverse-transform sampler for the truncated conditional distribution;
/// identical mapping to truncated_quantile with xi = u.
double truncated_sample(const ModelParams& model, const IntervalObservation& obs, double u);

/// Prepared inverse truncated CDF for one observation: interval-dependent
/// constants (tail masses, expm1 factors) are computed once so a whole
/// grid row costs one log1p-type evaluation per fraction.
class TruncatedQuantileFn {
public:
    /// Throws ZeroMassError if the interval mass underflows and
    /// std::invalid_argument for a degenerate interval.
    TruncatedQuantileFn(const ModelParams& model, const IntervalObservation& obs);

    double operator()(double xi) const;

private:
    ModelTag tag_;
    double a_, b_;
    int branch_ = 0;
    double c0_ = 0, c1_ = 0, c2_ = 0, c3_ = 0;
};

struct LogLikResult {
    double value;
    std::optional<std::size_t> zero_mass_index; // first zero-mass observation, if any
};

/// Observed-data log-likelihood: sum of log f over exact observations plus
/// log{F(b)-F(a)} over interval observations. Zero-mass intervals yield
/// -inf with the offending index flagged.
LogLikResult observed_loglik_detail(const ModelParams& model, const Dataset& dataset);
double observed_loglik(const ModelParams& model, const Dataset& dataset);

/// Per-observation conditional expectations consumed by the closed-form
/// M-steps: `mean` = E[Z_i | theta_s] always; `second_moment` = E[Z_i^2 |
/// theta_s], filled by the normal E-step only.
struct EStepMoments {
    std::vector<double> mean;
    std::vector<double> second_moment;
};

/// Conditional mean of an exponential restricted to [lower, upper],
/// evaluated through expm1 of the (b-a)-scaled exponent so narrow
/// intervals lose no digits. Never throws: every interval with positive
/// width has a well-defined conditional mean in this form.
double exp_interval_mean(double rate, double lower, double upper);

struct NormalIntervalMoments {
    double mean;
    double second_moment;
};

/// Truncated-normal mean and second moment on [lower, upper]; either end
/// may be infinite. Tail masses come from erfc on whichever tail is
/// smaller. Throws ZeroMassError when the interval mass underflows.
NormalIntervalMoments normal_interval_moments(double location, double scale,
                                              double lower, double upper);

EStepMoments exp_estep(double rate, const Dataset& dataset);
EStepMoments normal_estep(double location, double scale, const Dataset& dataset);

/// rate' = n / sum(mean).
double exp_mstep(const EStepMoments& moments);

/// location' = avg(mean); scale'^2 = avg(second_moment) - location'^2.
/// Throws DegenerateMStepError on nonpositive variance.
NormalParams normal_mstep(const EStepMoments& moments);

/// location' = median of all n*K pooled values (midpoint of the two
/// central order statistics when n*K is even); scale' = average absolute
/// deviation about location'. Throws DegenerateMStepError when scale' = 0.
LaplaceParams laplace_mstep(const SampleMatrix& samples);

/// scale' = sqrt( sum z^2 / (2 n K) ).
double rayleigh_mstep(const SampleMatrix& samples);

/// shape' = unique root of the shape equation (bracketed solve);
/// rate' = n K / sum q^shape'. Propagates NoUniqueRootError.
WeibullParams weibull_mstep(const SampleMatrix& samples);

} // namespace qem
