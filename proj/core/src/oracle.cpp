#include "qem/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qem/quadrature.hpp"

namespace qem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGridPoints = 21;
constexpr int kShrinkRounds = 8;
constexpr double kShrinkFactor = 10.0;
constexpr int kMaxRounds = 64; // shrink rounds plus any ridge re-expansions

struct Window {
    double lo, hi;
    double point(int j) const {
        return lo + (hi - lo) * static_cast<double>(j) / (kGridPoints - 1);
    }
};

} // namespace

ModelParams mle_grid_refine(ModelTag tag, const Dataset& dataset, const ParamBox& box) {
    const std::size_t dims = param_count(tag);
    if (box.lower.size() != dims || box.upper.size() != dims)
        throw std::invalid_argument("parameter box has wrong dimension for model");
    for (std::size_t d = 0; d < dims; ++d)
        if (!(box.lower[d] < box.upper[d]))
            throw std::invalid_argument("parameter box is empty");

    validate_for_model(dataset, tag);

    std::vector<Window> win(dims);
    for (std::size_t d = 0; d < dims; ++d)
        win[d] = {box.lower[d], box.upper[d]};

    auto loglik_at = [&](const std::vector<double>& values) {
        return observed_loglik(ModelParams::from_values(tag, values), dataset);
    };

    std::vector<double> center(dims);
    int shrink_rounds_done = 0;
    for (int round = 0; round < kMaxRounds && shrink_rounds_done < kShrinkRounds; ++round) {
        // evaluate the full coordinate grid (1 or 2 parameters)
        const std::size_t total =
            dims == 1 ? kGridPoints : static_cast<std::size_t>(kGridPoints) * kGridPoints;
        std::vector<double> ll(total, -kInf);
        std::vector<double> values(dims);
        double best = -kInf;
        for (std::size_t idx = 0; idx < total; ++idx) {
            values[0] = win[0].point(static_cast<int>(idx % kGridPoints));
            if (dims == 2)
                values[1] = win[1].point(static_cast<int>(idx / kGridPoints));
            ll[idx] = loglik_at(values);
            best = std::max(best, ll[idx]);
        }
        if (best == -kInf)
            throw BoxBoundaryError("likelihood is -inf over the whole box; widen or move the box");

        // bounding box of near-tied maxima; flat ridges resolve to midpoints
        const double tie_tol = 1e-10 * (1.0 + std::fabs(best));
        std::vector<int> tie_lo(dims, kGridPoints), tie_hi(dims, -1);
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (ll[idx] < best - tie_tol)
                continue;
            const int j0 = static_cast<int>(idx % kGridPoints);
            tie_lo[0] = std::min(tie_lo[0], j0);
            tie_hi[0] = std::max(tie_hi[0], j0);
            if (dims == 2) {
                const int j1 = static_cast<int>(idx / kGridPoints);
                tie_lo[1] = std::min(tie_lo[1], j1);
                tie_hi[1] = std::max(tie_hi[1], j1);
            }
        }

        bool expanded = false;
        for (std::size_t d = 0; d < dims; ++d) {
            const double spacing = (win[d].hi - win[d].lo) / (kGridPoints - 1);
            const double lo_pt = win[d].point(tie_lo[d]);
            const double hi_pt = win[d].point(tie_hi[d]);
            if (lo_pt <= box.lower[d] + 0.5 * spacing || hi_pt >= box.upper[d] - 0.5 * spacing)
                throw BoxBoundaryError("maximizer at the box boundary in " +
                                       std::string(param_names(tag)[d]) + "; widen the box");
            if (tie_lo[d] == 0 && tie_hi[d] == kGridPoints - 1) {
                // the whole window ties: the flat stretch extends past it, so
                // re-cover it before shrinking
                const double width = win[d].hi - win[d].lo;
                win[d].lo = std::max(box.lower[d], win[d].lo - width);
                win[d].hi = std::min(box.upper[d], win[d].hi + width);
                expanded = true;
            }
        }
        if (expanded)
            continue;

        for (std::size_t d = 0; d < dims; ++d) {
            const double width = win[d].hi - win[d].lo;
            const double spacing = width / (kGridPoints - 1);
            center[d] = 0.5 * (win[d].point(tie_lo[d]) + win[d].point(tie_hi[d]));
            // keep one old-spacing of non-tied margin on each side so the next
            // window never consists of tied points only
            const double half =
                std::max(0.5 * width / kShrinkFactor,
                         0.5 * (win[d].point(tie_hi[d]) - win[d].point(tie_lo[d])) + spacing);
            win[d].lo = std::max(box.lower[d], center[d] - half);
            win[d].hi = std::min(box.upper[d], center[d] + half);
        }
        ++shrink_rounds_done;
    }

    // compass-search polish: diagonal moves track correlated ridges that
    // axis-aligned shrinking cannot follow
    {
        std::vector<double> step(dims);
        for (std::size_t d = 0; d < dims; ++d)
            step[d] = std::max(win[d].hi - win[d].lo, 1e-12 * std::fabs(center[d]));
        std::vector<double> candidate(dims);
        double best = loglik_at(center);
        for (int iter = 0; iter < 400; ++iter) {
            bool moved = false;
            const int span = dims == 1 ? 1 : 4; // +-1 per axis, diagonals for 2-D
            for (int dir = 0; dir < 2 * span; ++dir) {
                for (std::size_t d = 0; d < dims; ++d)
                    candidate[d] = center[d];
                const int sign = dir % 2 == 0 ? 1 : -1;
                const int axis = dir / 2;
                if (dims == 1 || axis < 2) {
                    const std::size_t d = dims == 1 ? 0 : static_cast<std::size_t>(axis);
                    candidate[d] += sign * step[d];
                } else {
                    candidate[0] += sign * step[0];
                    candidate[1] += (axis == 2 ? sign : -sign) * step[1];
                }
                bool inside = true;
                for (std::size_t d = 0; d < dims; ++d)
                    inside = inside && candidate[d] > box.lower[d] && candidate[d] < box.upper[d];
                if (!inside)
                    continue;
                const double v = loglik_at(candidate);
                if (v > best) {
                    best = v;
                    center = candidate;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                double rel = 0.0;
                for (std::size_t d = 0; d < dims; ++d) {
                    step[d] *= 0.5;
                    rel = std::max(rel, step[d] / std::max(std::fabs(center[d]), 1e-300));
                }
                if (rel < 1e-9)
                    break;
            }
        }
    }

    // polish: per coordinate, bisect the edges of the near-tie region around
    // the center and recenter on their midpoint; on a flat ridge this lands
    // on the segment midpoint, on a smooth peak it centers the quadratic
    for (std::size_t d = 0; d < dims; ++d) {
        std::vector<double> values = center;
        auto ll_at = [&](double x) {
            values[d] = x;
            return loglik_at(values);
        };
        const double best_c = ll_at(center[d]);
        if (best_c == -kInf)
            continue;
        const double threshold = best_c - 1e-10 * (1.0 + std::fabs(best_c));
        auto bisect_edge = [&](double inside, double outside) {
            if (ll_at(outside) >= threshold)
                return outside;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (inside + outside);
                (ll_at(mid) >= threshold ? inside : outside) = mid;
            }
            return inside;
        };
        const double lo_edge = bisect_edge(center[d], win[d].lo);
        const double hi_edge = bisect_edge(center[d], win[d].hi);
        center[d] = 0.5 * (lo_edge + hi_edge);
        values[d] = center[d];
    }
    return ModelParams::from_values(tag, center);
}

double quadrature_estep(const ModelParams& model, const IntervalObservation& obs,
                        const Integrand& integrand) {
    if (obs.is_exact())
        throw std::invalid_argument("quadrature_estep requires a non-degenerate interval");
    double lo = obs.lower;
    double hi = obs.upper;
    if (has_nonnegative_support(model.tag()))
        lo = std::max(lo, 0.0);

    const double log_mass = log_interval_mass(model, lo, hi);
    const double mass = std::exp(log_mass);
    if (mass == 0.0)
        throw ZeroMassError("quadrature_estep: zero-mass interval");

    auto g = [&](double z) -> double {
        switch (integrand.kind) {
            case IntegrandKind::mean: return z;
            case IntegrandKind::second_moment: return z * z;
            case IntegrandKind::log_value: return std::log(z);
            case IntegrandKind::power: return std::pow(z, integrand.parameter);
            case IntegrandKind::abs_deviation: return std::fabs(z - integrand.parameter);
        }
        return 0.0;
    };
    auto f = [&](double z) -> double {
        const double dens = pdf(model, z);
        return dens == 0.0 ? 0.0 : g(z) * dens / mass;
    };

    constexpr double tol = 1e-10;
    constexpr std::size_t budget = 1000000;
    // split at the kink of |z - c|, and at the location for the Laplace
    // density's own kink so panels stay smooth
    std::vector<double> cuts;
    if (integrand.kind == IntegrandKind::abs_deviation && integrand.parameter > lo &&
        integrand.parameter < hi)
        cuts.push_back(integrand.parameter);
    if (model.tag() == ModelTag::laplace && model.laplace().location > lo &&
        model.laplace().location < hi)
        cuts.push_back(model.laplace().location);
    std::sort(cuts.begin(), cuts.end());

    double value = 0.0;
    double prev = lo;
    const double piece_tol = tol / static_cast<double>(cuts.size() + 1);
    const std::size_t piece_budget = budget / (cuts.size() + 1);
    for (double c : cuts) {
        value += integrate(f, prev, c, piece_tol, piece_budget).value;
        prev = c;
    }
    value += integrate(f, prev, hi, piece_tol, piece_budget).value;
    return value;
}

} // namespace qem
