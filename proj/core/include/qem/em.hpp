#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qem/distributions.hpp"
#include "qem/interval_data.hpp"
#include "qem/model.hpp"
#include "qem/sample_matrix.hpp"

namespace qem {

enum class Strategy { exact_em, mcem, qem };

/// Fraction grids for the quantile E-step: midpoint (k-1/2)/K,
/// left k/K, shifted k/(K+1).
enum class XiScheme { midpoint, left, shifted };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy_name(std::string_view name);
std::string_view xi_scheme_name(XiScheme s);
std::optional<XiScheme> parse_xi_scheme_name(std::string_view name);

struct FitConfig {
    Strategy strategy = Strategy::qem;
    int grid_size = 1000;            // K; unused by exact EM
    XiScheme scheme = XiScheme::midpoint;
    double epsilon = 1e-5;           // relative stopping precision
    int max_iterations = 500;
    std::uint64_t seed = 0;          // MCEM only
    ModelParams initial;

    explicit FitConfig(ModelParams init) : initial(init) {}
};

struct FitResult {
    ModelParams estimate;
    std::vector<ModelParams> trace;   // theta^(0) .. theta^(iterations)
    std::vector<double> loglik_trace; // observed-data log-likelihood per trace entry
    bool converged = false;
    int iterations = 0;
};

/// Iteration failure (degenerate M-step, zero-mass interval, no unique
/// shape root) carrying the partial trace up to the failing step.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& msg, FitResult partial)
        : std::runtime_error(msg), partial_(std::move(partial)) {}

    const FitResult& partial() const noexcept { return partial_; }

private:
    FitResult partial_;
};

/// K strictly increasing fractions per the scheme. Midpoint and shifted
/// grids lie strictly inside (0,1); the left grid k/K ends at 1, which
/// truncated_quantile accepts for bounded intervals only.
std::vector<double> quantile_grid(int grid_size, XiScheme scheme);

/// n x K matrix of conditional quantiles (QEM) or inverse-transform
/// samples (MCEM, uniforms keyed by (iteration, observation, k) from the
/// seeded counter stream). Degenerate observations give constant rows.
/// Zero-mass errors are rethrown with the observation index attached.
SampleMatrix estep_matrix(const ModelParams& model, const Dataset& dataset,
                          const FitConfig& config, int iteration = 0);

/// True iff every coordinate satisfies
/// |next_j - prev_j| < epsilon * max(|next_j|, 1e-300).
bool check_convergence(const ModelParams& prev, const ModelParams& next, double epsilon);

/// Full EM/MCEM/QEM driver: builds E-step moments or matrices, applies the
/// model M-step, applies the relative stopping rule (two consecutive passes
/// required), and records the full parameter and log-likelihood trace.
FitResult run_fit(ModelTag model, const Dataset& dataset, const FitConfig& config);

} // namespace qem
