#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qem/interval_data.hpp"

namespace qem {

// Interval CSV: `lower,upper` per record, optional `lower,upper` header,
// `inf` / `-inf` (case-insensitive) for unbounded ends.
Dataset parse_interval_csv(std::istream& in);
Dataset parse_interval_csv(std::string_view text);

// Grouped CSV: `lower,upper,count` with the same conventions;
// `upper=inf` marks the terminal open interval.
std::vector<GroupedRow> parse_grouped_csv(std::istream& in);
std::vector<GroupedRow> parse_grouped_csv(std::string_view text);

/// Shortest round-trip formatting; parse(serialize(d)) == d exactly.
std::string serialize_interval_csv(const Dataset& dataset);

} // namespace qem
