#include "qem/fixtures.hpp"

#include <array>
#include <limits>

namespace qem {
namespace fixtures {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Dataset build_leukemia() {
    // remission times in weeks, in the original reporting order;
    // right-censored entries become [t, inf)
    std::vector<IntervalObservation> obs;
    obs.emplace_back(6.0, 6.0);
    obs.emplace_back(6.0, 6.0);
    obs.emplace_back(6.0, 6.0);
    obs.emplace_back(6.0, kInf);
    obs.emplace_back(7.0, 7.0);
    obs.emplace_back(9.0, kInf);
    obs.emplace_back(10.0, 10.0);
    obs.emplace_back(10.0, kInf);
    obs.emplace_back(11.0, kInf);
    obs.emplace_back(13.0, 13.0);
    obs.emplace_back(16.0, 16.0);
    obs.emplace_back(17.0, kInf);
    obs.emplace_back(19.0, kInf);
    obs.emplace_back(20.0, kInf);
    obs.emplace_back(22.0, 22.0);
    obs.emplace_back(23.0, 23.0);
    obs.emplace_back(25.0, kInf);
    obs.emplace_back(32.0, kInf);
    obs.emplace_back(32.0, kInf);
    obs.emplace_back(34.0, kInf);
    obs.emplace_back(35.0, kInf);
    return Dataset(std::move(obs));
}

Dataset build_gupta() {
    std::vector<IntervalObservation> obs;
    for (double y : {1.613, 1.644, 1.663, 1.732, 1.740, 1.763, 1.778})
        obs.emplace_back(y, y);
    for (int i = 0; i < 3; ++i)
        obs.emplace_back(1.778, kInf);
    return Dataset(std::move(obs));
}

Dataset build_balakrishnan() {
    std::vector<IntervalObservation> obs;
    for (double y : {32.00692, 37.75687, 43.84736, 46.26761, 46.90651, 47.26220, 47.28952,
                     47.59391, 48.06508, 49.25429, 50.27790, 50.48675, 50.66167, 53.33585,
                     53.49258, 53.56681, 53.98112, 54.94154})
        obs.emplace_back(y, y);
    for (int i = 0; i < 2; ++i)
        obs.emplace_back(54.94154, kInf);
    return Dataset(std::move(obs));
}

Dataset build_rayleigh20() {
    std::vector<IntervalObservation> obs;
    for (double y : {1.950, 2.295, 4.282, 4.339, 4.411, 4.460, 4.699, 5.319, 5.440, 5.777,
                     7.485, 7.620, 8.181, 8.443, 10.627})
        obs.emplace_back(y, y);
    for (int i = 0; i < 5; ++i)
        obs.emplace_back(10.627, kInf);
    return Dataset(std::move(obs));
}

constexpr std::array<GroupedRow, 9> kNelsonRows = {{
    {0.0, 6.12, 5},
    {6.12, 19.92, 16},
    {19.92, 29.64, 12},
    {29.64, 35.40, 18},
    {35.40, 39.72, 18},
    {39.72, 45.24, 2},
    {45.24, 52.32, 6},
    {52.32, 63.48, 17},
    {63.48, kInf, 73},
}};

constexpr std::array<std::string_view, 5> kNames = {
    "leukemia", "gupta", "balakrishnan", "rayleigh20", "nelson-cracks",
};

} // namespace

const Dataset& leukemia() {
    static const Dataset d = build_leukemia();
    return d;
}

const Dataset& gupta() {
    static const Dataset d = build_gupta();
    return d;
}

const Dataset& balakrishnan() {
    static const Dataset d = build_balakrishnan();
    return d;
}

const Dataset& rayleigh20() {
    static const Dataset d = build_rayleigh20();
    return d;
}

std::span<const GroupedRow> nelson_cracks_rows() {
    return kNelsonRows;
}

const Dataset& nelson_cracks() {
    static const Dataset d = expand_grouped(kNelsonRows);
    return d;
}

std::span<const std::string_view> names() {
    return kNames;
}

} // namespace fixtures
} // namespace qem
