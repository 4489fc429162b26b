#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace qem {

class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadratureResult {
    double value;
    double error_estimate;
    std::size_t evaluations;
};

/// Adaptive Gauss-Kronrod 7-15 integration of f over [lower, upper].
/// Infinite ends are mapped onto a finite parameter by the monotone
/// substitution z = a + t/(1-t) (resp. z = b - t/(1-t)).
/// Throws QuadratureError if `abs_tol` cannot be met within
/// `max_evaluations` integrand evaluations.
QuadratureResult integrate(const std::function<double(double)>& f,
                           double lower, double upper,
                           double abs_tol = 1e-10,
                           std::size_t max_evaluations = 1000000);

} // namespace qem
