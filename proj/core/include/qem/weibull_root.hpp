#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qem/errors.hpp"
#include "qem/sample_matrix.hpp"

namespace qem {

/// Preprocessed inputs for the Weibull shape equation g(beta) = h(beta).
///
/// Stores the distinct log-samples with multiplicities (sorted ascending),
/// the largest log-sample, and the plain average of all logs. Equal samples
/// are merged so h(beta) evaluation scales with the number of distinct
/// values, which matters for grouped data where whole rows repeat.
class ShapeEquationInputs {
public:
    /// All entries must be strictly positive and finite.
    static ShapeEquationInputs from_samples(const SampleMatrix& samples);
    static ShapeEquationInputs from_values(std::span<const double> values);

    std::span<const double> log_values() const noexcept { return log_values_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double log_max() const noexcept { return log_max_; }
    double mean_log() const noexcept { return mean_log_; }
    std::size_t count() const noexcept { return count_; }

    /// True when the samples are equal or numerically indistinguishable
    /// from equal (log_max - mean_log < 1e-12): no unique root exists.
    bool degenerate() const noexcept;

private:
    std::vector<double> log_values_;
    std::vector<double> weights_;
    double log_max_ = 0.0;
    double mean_log_ = 0.0;
    std::size_t count_ = 0;
};

/// g(beta) = 1/beta, strictly decreasing on (0, inf).
double g_of_beta(double beta);

/// h(beta) = sum(q^beta log q) / sum(q^beta) - mean(log q), nondecreasing.
/// Powers are computed as exp(beta * (log q - log q_max)) so the largest
/// term is exactly 1 and no exponent overflows.
double h_of_beta(const ShapeEquationInputs& inputs, double beta);

/// log( sum over all samples of q^beta ), with the same exponent shift.
double log_power_sum(const ShapeEquationInputs& inputs, double beta);

struct BetaBounds {
    double lower; // nK / sum(log q_max - log q)
    double upper; // 1 / h(lower)
};

/// Bracket guaranteed to contain the unique root of g - h.
/// Throws NoUniqueRootError for degenerate inputs.
BetaBounds beta_bounds(const ShapeEquationInputs& inputs);

/// Root of g(beta) = h(beta) inside [bounds.lower, bounds.upper] by
/// safeguarded Brent bracketing (inverse quadratic / secant steps with a
/// bisection fallback). `rel_tol` is relative on beta.
double solve_beta(const ShapeEquationInputs& inputs, double rel_tol = 1e-12);

} // namespace qem
