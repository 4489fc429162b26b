#include "qem/em.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "qem/rng.hpp"
#include "qem/special_functions.hpp"

namespace qem {

namespace {

constexpr std::uint64_t kMcemStreamTag = 0x4D43454D; // uniforms for MCEM draws

void validate_config(ModelTag tag, const Dataset& dataset, const FitConfig& cfg) {
    if (cfg.initial.tag() != tag)
        throw std::invalid_argument("initial parameters do not match the model tag");
    if (cfg.grid_size < 1)
        throw std::invalid_argument("grid size K must be >= 1");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw std::invalid_argument("stopping precision must satisfy 0 < epsilon < 1");
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("max_iterations must be >= 1");
    if (cfg.strategy == Strategy::exact_em && tag != ModelTag::exponential &&
        tag != ModelTag::normal)
        throw std::invalid_argument(
            "exact EM is available for the exponential and normal models only");
    validate_for_model(dataset, tag);
}

// One EM step via the sampling strategies: n x K matrix, then the model's
// matrix M-step (per-row moments feed the closed-form updates for the
// exponential and normal models).
ModelParams matrix_step(ModelTag tag, const Dataset& dataset, const ModelParams& params,
                        const FitConfig& cfg, int iteration) {
    const SampleMatrix z = estep_matrix(params, dataset, cfg, iteration);
    switch (tag) {
        case ModelTag::exponential: {
            EStepMoments moments;
            moments.mean.reserve(z.rows);
            for (std::size_t i = 0; i < z.rows; ++i)
                moments.mean.push_back(pairwise_sum(z.row(i)) / static_cast<double>(z.cols));
            return ModelParams(ExponentialParams{exp_mstep(moments)});
        }
        case ModelTag::normal: {
            EStepMoments moments;
            moments.mean.reserve(z.rows);
            moments.second_moment.reserve(z.rows);
            std::vector<double> sq(z.cols);
            for (std::size_t i = 0; i < z.rows; ++i) {
                const auto row = z.row(i);
                moments.mean.push_back(pairwise_sum(row) / static_cast<double>(z.cols));
                for (std::size_t k = 0; k < z.cols; ++k)
                    sq[k] = row[k] * row[k];
                moments.second_moment.push_back(pairwise_sum(sq) / static_cast<double>(z.cols));
            }
            return ModelParams(normal_mstep(moments));
        }
        case ModelTag::laplace:
            return ModelParams(laplace_mstep(z));
        case ModelTag::rayleigh:
            return ModelParams(RayleighParams{rayleigh_mstep(z)});
        case ModelTag::weibull:
            return ModelParams(weibull_mstep(z));
    }
    throw std::logic_error("unreachable");
}

ModelParams em_step(ModelTag tag, const Dataset& dataset, const ModelParams& params,
                    const FitConfig& cfg, int iteration) {
    if (cfg.strategy == Strategy::exact_em) {
        if (tag == ModelTag::exponential)
            return ModelParams(
                ExponentialParams{exp_mstep(exp_estep(params.exponential().rate, dataset))});
        const auto& p = params.normal();
        return ModelParams(normal_mstep(normal_estep(p.location, p.scale, dataset)));
    }
    return matrix_step(tag, dataset, params, cfg, iteration);
}

} // namespace

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::exact_em: return "em";
        case Strategy::mcem: return "mcem";
        case Strategy::qem: return "qem";
    }
    return "?";
}

std::optional<Strategy> parse_strategy_name(std::string_view name) {
    if (name == "em") return Strategy::exact_em;
    if (name == "mcem") return Strategy::mcem;
    if (name == "qem") return Strategy::qem;
    return std::nullopt;
}

std::string_view xi_scheme_name(XiScheme s) {
    switch (s) {
        case XiScheme::midpoint: return "midpoint";
        case XiScheme::left: return "left";
        case XiScheme::shifted: return "shifted";
    }
    return "?";
}

std::optional<XiScheme> parse_xi_scheme_name(std::string_view name) {
    if (name == "midpoint") return XiScheme::midpoint;
    if (name == "left") return XiScheme::left;
    if (name == "shifted") return XiScheme::shifted;
    return std::nullopt;
}

std::vector<double> quantile_grid(int grid_size, XiScheme scheme) {
    if (grid_size < 1)
        throw std::invalid_argument("grid size K must be >= 1");
    std::vector<double> xs(static_cast<std::size_t>(grid_size));
    const double K = grid_size;
    for (int k = 1; k <= grid_size; ++k) {
        switch (scheme) {
            case XiScheme::midpoint: xs[k - 1] = (k - 0.5) / K; break;
            case XiScheme::left: xs[k - 1] = k / K; break;
            case XiScheme::shifted: xs[k - 1] = k / (K + 1.0); break;
        }
    }
    return xs;
}

SampleMatrix estep_matrix(const ModelParams& model, const Dataset& dataset,
                          const FitConfig& cfg, int iteration) {
    if (cfg.strategy == Strategy::exact_em)
        throw std::invalid_argument("estep_matrix applies to the sampling strategies only");
    const std::size_t n = dataset.size();
    const std::size_t K = static_cast<std::size_t>(cfg.grid_size);
    SampleMatrix out(n, K);

    const std::vector<double> grid =
        cfg.strategy == Strategy::qem ? quantile_grid(cfg.grid_size, cfg.scheme)
                                      : std::vector<double>{};
    const CounterStream stream(CounterStream::derive_key(cfg.seed, kMcemStreamTag));

    // identical observations get identical quantile rows; compute once
    std::map<std::pair<double, double>, std::size_t> qem_rows;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& obs = dataset[i];
        auto row = out.row(i);
        if (obs.is_exact()) {
            for (auto& v : row)
                v = obs.lower;
            continue;
        }
        try {
            if (cfg.strategy == Strategy::qem) {
                const auto key = std::make_pair(obs.lower, obs.upper);
                if (auto it = qem_rows.find(key); it != qem_rows.end()) {
                    const auto src = out.row(it->second);
                    std::copy(src.begin(), src.end(), row.begin());
                    continue;
                }
                const TruncatedQuantileFn fn(model, obs);
                for (std::size_t k = 0; k < K; ++k)
                    row[k] = fn(grid[k]);
                qem_rows.emplace(key, i);
            } else {
                const TruncatedQuantileFn fn(model, obs);
                for (std::size_t k = 0; k < K; ++k)
                    row[k] = fn(stream.uniform01(static_cast<std::uint64_t>(iteration), i, k));
            }
        } catch (const ZeroMassError& e) {
            throw ZeroMassError("observation " + std::to_string(i) + ": " + e.what(), i);
        }
    }
    return out;
}

bool check_convergence(const ModelParams& prev, const ModelParams& next, double epsilon) {
    if (prev.tag() != next.tag())
        throw std::invalid_argument("check_convergence requires matching model tags");
    const auto p = prev.values();
    const auto q = next.values();
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double floor = std::max(std::fabs(q[j]), 1e-300);
        if (!(std::fabs(q[j] - p[j]) < epsilon * floor))
            return false;
    }
    return true;
}

FitResult run_fit(ModelTag tag, const Dataset& dataset, const FitConfig& cfg) {
    validate_config(tag, dataset, cfg);

    FitResult result{cfg.initial, {cfg.initial}, {observed_loglik(cfg.initial, dataset)}, false, 0};
    ModelParams params = cfg.initial;
    int consecutive_passes = 0;

    for (int s = 1; s <= cfg.max_iterations; ++s) {
        ModelParams next = params;
        try {
            next = em_step(tag, dataset, params, cfg, s);
        } catch (const std::exception& e) {
            result.estimate = params;
            result.iterations = s - 1;
            throw FitError("iteration " + std::to_string(s) + ": " + e.what(), std::move(result));
        }
        result.trace.push_back(next);
        result.loglik_trace.push_back(observed_loglik(next, dataset));
        result.iterations = s;

        // two consecutive passes of the relative stopping rule
        consecutive_passes = check_convergence(params, next, cfg.epsilon) ? consecutive_passes + 1 : 0;
        params = next;
        if (consecutive_passes >= 2) {
            result.converged = true;
            break;
        }
    }
    result.estimate = params;
    return result;
}

} // namespace qem
