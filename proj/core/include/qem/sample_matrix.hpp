#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qem {

/// Row-major n x K matrix of E-step samples or quantiles; row i belongs to
/// observation i. Treated as read-only by every M-step.
struct SampleMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    SampleMatrix() = default;
    SampleMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    double& at(std::size_t i, std::size_t k) { return data[i * cols + k]; }
    double at(std::size_t i, std::size_t k) const { return data[i * cols + k]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

} // namespace qem
