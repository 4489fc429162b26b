#include "qem/model.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qem {

namespace {

void require_positive(double v, const char* what) {
    if (!(std::isfinite(v) && v > 0.0))
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be finite");
}

} // namespace

ModelParams::ModelParams(ExponentialParams p) : v_(p) {
    require_positive(p.rate, "exponential rate");
}

ModelParams::ModelParams(NormalParams p) : v_(p) {
    require_finite(p.location, "normal location");
    require_positive(p.scale, "normal scale");
}

ModelParams::ModelParams(LaplaceParams p) : v_(p) {
    require_finite(p.location, "laplace location");
    require_positive(p.scale, "laplace scale");
}

ModelParams::ModelParams(RayleighParams p) : v_(p) {
    require_positive(p.scale, "rayleigh scale");
}

ModelParams::ModelParams(WeibullParams p) : v_(p) {
    require_positive(p.rate, "weibull rate");
    require_positive(p.shape, "weibull shape");
}

ModelTag ModelParams::tag() const noexcept {
    switch (v_.index()) {
        case 0: return ModelTag::exponential;
        case 1: return ModelTag::normal;
        case 2: return ModelTag::laplace;
        case 3: return ModelTag::rayleigh;
        default: return ModelTag::weibull;
    }
}

std::vector<double> ModelParams::values() const {
    return visit([](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) return {p.rate};
        else if constexpr (std::is_same_v<T, NormalParams>) return {p.location, p.scale};
        else if constexpr (std::is_same_v<T, LaplaceParams>) return {p.location, p.scale};
        else if constexpr (std::is_same_v<T, RayleighParams>) return {p.scale};
        else return {p.rate, p.shape};
    });
}

ModelParams ModelParams::from_values(ModelTag tag, std::span<const double> values) {
    if (values.size() != param_count(tag))
        throw std::invalid_argument("parameter vector has wrong length for model");
    switch (tag) {
        case ModelTag::exponential: return ModelParams(ExponentialParams{values[0]});
        case ModelTag::normal: return ModelParams(NormalParams{values[0], values[1]});
        case ModelTag::laplace: return ModelParams(LaplaceParams{values[0], values[1]});
        case ModelTag::rayleigh: return ModelParams(RayleighParams{values[0]});
        case ModelTag::weibull: return ModelParams(WeibullParams{values[0], values[1]});
    }
    throw std::logic_error("unreachable");
}

bool ModelParams::operator==(const ModelParams& other) const {
    return tag() == other.tag() && values() == other.values();
}

std::string_view model_name(ModelTag tag) {
    switch (tag) {
        case ModelTag::exponential: return "exponential";
        case ModelTag::normal: return "normal";
        case ModelTag::laplace: return "laplace";
        case ModelTag::rayleigh: return "rayleigh";
        case ModelTag::weibull: return "weibull";
    }
    return "?";
}

std::optional<ModelTag> parse_model_name(std::string_view name) {
    if (name == "exponential") return ModelTag::exponential;
    if (name == "normal") return ModelTag::normal;
    if (name == "laplace") return ModelTag::laplace;
    if (name == "rayleigh") return ModelTag::rayleigh;
    if (name == "weibull") return ModelTag::weibull;
    return std::nullopt;
}

bool has_nonnegative_support(ModelTag tag) {
    return tag == ModelTag::exponential || tag == ModelTag::rayleigh || tag == ModelTag::weibull;
}

std::size_t param_count(ModelTag tag) {
    switch (tag) {
        case ModelTag::exponential:
        case ModelTag::rayleigh: return 1;
        default: return 2;
    }
}

std::span<const std::string_view> param_names(ModelTag tag) {
    static constexpr std::array<std::string_view, 1> exp_names = {"lambda"};
    static constexpr std::array<std::string_view, 2> loc_scale = {"mu", "sigma"};
    static constexpr std::array<std::string_view, 1> ray_names = {"beta"};
    static constexpr std::array<std::string_view, 2> wei_names = {"lambda", "beta"};
    switch (tag) {
        case ModelTag::exponential: return exp_names;
        case ModelTag::normal:
        case ModelTag::laplace: return loc_scale;
        case ModelTag::rayleigh: return ray_names;
        case ModelTag::weibull: return wei_names;
    }
    return {};
}

} // namespace qem
