#include "qem/interval_data.hpp"

#include <cmath>
#include <string>

namespace qem {

IntervalObservation::IntervalObservation(double lo, double hi) : lower(lo), upper(hi) {
    if (std::isnan(lo) || std::isnan(hi))
        throw DataError("interval bound is NaN");
    if (lo > hi)
        throw DataError("interval lower bound exceeds upper bound");
    if (std::isinf(lo) && std::isinf(hi))
        throw DataError("interval has both bounds infinite");
}

bool IntervalObservation::lower_unbounded() const noexcept {
    return std::isinf(lower) && lower < 0.0;
}

bool IntervalObservation::upper_unbounded() const noexcept {
    return std::isinf(upper) && upper > 0.0;
}

Dataset::Dataset(std::vector<IntervalObservation> observations)
    : obs_(std::move(observations)), exact_count_(0) {
    if (obs_.empty())
        throw DataError("empty dataset");
    for (const auto& o : obs_)
        if (o.is_exact())
            ++exact_count_;
}

Dataset expand_grouped(std::span<const GroupedRow> rows) {
    std::vector<IntervalObservation> obs;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (!(row.lower < row.upper))
            throw DataError("grouped row requires lower < upper", r);
        for (std::uint64_t c = 0; c < row.count; ++c)
            obs.emplace_back(row.lower, row.upper);
    }
    if (obs.empty())
        throw DataError("empty dataset: grouped rows expand to zero observations");
    return Dataset(std::move(obs));
}

void validate_for_model(const Dataset& dataset, ModelTag model) {
    if (!has_nonnegative_support(model))
        return;
    const auto& obs = dataset.observations();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (!(obs[i].lower >= 0.0))
            throw DataError("record " + std::to_string(i) + ": negative lower bound for " +
                                std::string(model_name(model)) + " support",
                            i);
    }
}

} // namespace qem
