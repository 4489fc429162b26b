#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qem {

enum class ModelTag { exponential, normal, laplace, rayleigh, weibull };

/// f(x) = rate * exp(-rate * x), x >= 0
struct ExponentialParams {
    double rate;
};

struct NormalParams {
    double location;
    double scale;
};

/// f(x) = exp(-|x - location| / scale) / (2 * scale)
struct LaplaceParams {
    double location;
    double scale;
};

/// f(x) = x / scale^2 * exp(-x^2 / (2 * scale^2)), x > 0
struct RayleighParams {
    double scale;
};

/// f(x) = rate * shape * x^(shape-1) * exp(-rate * x^shape), x > 0
struct WeibullParams {
    double rate;
    double shape;
};

/// Tagged parameter vector for one of the five lifetime models.
/// Construction validates that every rate/scale/shape is finite and
/// strictly positive and that locations are finite.
class ModelParams {
public:
    ModelParams(ExponentialParams p);
    ModelParams(NormalParams p);
    ModelParams(LaplaceParams p);
    ModelParams(RayleighParams p);
    ModelParams(WeibullParams p);

    ModelTag tag() const noexcept;

    const ExponentialParams& exponential() const { return std::get<ExponentialParams>(v_); }
    const NormalParams& normal() const { return std::get<NormalParams>(v_); }
    const LaplaceParams& laplace() const { return std::get<LaplaceParams>(v_); }
    const RayleighParams& rayleigh() const { return std::get<RayleighParams>(v_); }
    const WeibullParams& weibull() const { return std::get<WeibullParams>(v_); }

    /// Parameter vector in declaration order (rate; location,scale; ...).
    std::vector<double> values() const;

    /// Rebuild from a parameter vector; validates length and positivity.
    static ModelParams from_values(ModelTag tag, std::span<const double> values);

    bool operator==(const ModelParams& other) const;

    template <class Visitor>
    decltype(auto) visit(Visitor&& vis) const {
        return std::visit(std::forward<Visitor>(vis), v_);
    }

private:
    std::variant<ExponentialParams, NormalParams, LaplaceParams, RayleighParams, WeibullParams> v_;
};

std::string_view model_name(ModelTag tag);
std::optional<ModelTag> parse_model_name(std::string_view name);

/// Exponential, Rayleigh and Weibull live on [0, inf).
bool has_nonnegative_support(ModelTag tag);

std::size_t param_count(ModelTag tag);
std::span<const std::string_view> param_names(ModelTag tag);

} // namespace qem
