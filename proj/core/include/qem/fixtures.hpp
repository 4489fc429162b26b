#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qem/interval_data.hpp"
#include "qem/model.hpp"

namespace qem {
namespace fixtures {

/// 6-MP leukemia remission times (weeks): 21 patients, 9 exact,
/// 12 right-censored. Exponential example.
const Dataset& leukemia();

/// Type-II censored normal sample: 10 units, largest 3 censored at 1.778.
const Dataset& gupta();

/// Type-II censored Laplace sample: 20 units, largest 2 censored at 54.94154.
const Dataset& balakrishnan();

/// Simulated Rayleigh sample: 20 units, largest 5 censored at 10.627.
const Dataset& rayleigh20();

/// Intermittent-inspection crack counts: 9 windows, 167 parts,
/// terminal window open. Weibull / exponential grouped example.
std::span<const GroupedRow> nelson_cracks_rows();
const Dataset& nelson_cracks();

std::span<const std::string_view> names();

} // namespace fixtures
} // namespace qem
