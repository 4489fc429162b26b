#pragma once

#include <stdexcept>
#include <vector>

#include "qem/distributions.hpp"
#include "qem/interval_data.hpp"
#include "qem/model.hpp"

namespace qem {

/// Per-parameter search bounds for the brute-force maximizer.
struct ParamBox {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// The maximizer ran into the caller-supplied box boundary.
class BoxBoundaryError : public std::runtime_error {
public:
    explicit BoxBoundaryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Independent brute-force MLE: maximizes observed_loglik by iterated
/// coordinate-grid refinement (21-point grids, shrink factor 10, 8 rounds).
/// Near-tied maxima are handled by recentering on the bounding box of the
/// tie set, so flat likelihood ridges resolve to the segment midpoint
/// instead of an arbitrary ridge point. Deliberately derivative-free and
/// independent of the EM machinery.
ModelParams mle_grid_refine(ModelTag model, const Dataset& dataset, const ParamBox& box);

enum class IntegrandKind {
    mean,          // z
    second_moment, // z^2
    log_value,     // log z
    power,         // z^parameter
    abs_deviation, // |z - parameter|
};

struct Integrand {
    IntegrandKind kind;
    double parameter = 0.0;
};

/// Adaptive quadrature of  integral g(z) p_z(z | model) dz  over the
/// observation's interval, where p_z is the model density renormalized to
/// the interval. Infinite ends are mapped by a monotone change of
/// variable. Absolute tolerance 1e-10, node budget 1e6, hard error beyond.
double quadrature_estep(const ModelParams& model, const IntervalObservation& obs,
                        const Integrand& integrand);

} // namespace qem
