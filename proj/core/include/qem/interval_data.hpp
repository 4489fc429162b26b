#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qem/errors.hpp"
#include "qem/model.hpp"

namespace qem {

/// One unit's lifetime bound [lower, upper]. Either end may be infinite
/// (never both); lower == upper encodes an exactly observed lifetime.
/// Degeneracy is exact equality of the two stored doubles, never a
/// tolerance: repeating the value is how a record states exactness.
struct IntervalObservation {
    double lower;
    double upper;

    IntervalObservation(double lo, double hi);

    bool is_exact() const noexcept { return lower == upper; }
    bool lower_unbounded() const noexcept;
    bool upper_unbounded() const noexcept;

    bool operator==(const IntervalObservation&) const = default;
};

/// Validated, immutable collection of interval observations.
class Dataset {
public:
    explicit Dataset(std::vector<IntervalObservation> observations);

    const std::vector<IntervalObservation>& observations() const noexcept { return obs_; }
    const IntervalObservation& operator[](std::size_t i) const { return obs_[i]; }

    std::size_t size() const noexcept { return obs_.size(); }
    std::size_t exact_count() const noexcept { return exact_count_; }
    std::size_t interval_count() const noexcept { return obs_.size() - exact_count_; }

    bool operator==(const Dataset& other) const { return obs_ == other.obs_; }

private:
    std::vector<IntervalObservation> obs_;
    std::size_t exact_count_;
};

/// Number of failures observed inside one inspection window (lower, upper).
struct GroupedRow {
    double lower;
    double upper;
    std::uint64_t count;
};

/// Expands each row into `count` identical interval observations.
/// Throws DataError on invalid rows or an all-zero expansion.
Dataset expand_grouped(std::span<const GroupedRow> rows);

/// Confirms support compatibility: nonnegative lower bounds for the
/// nonnegative-support models; -inf lower bounds permitted otherwise.
/// Throws DataError naming the offending record index.
void validate_for_model(const Dataset& dataset, ModelTag model);

} // namespace qem
