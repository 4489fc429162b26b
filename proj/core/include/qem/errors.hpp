#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qem {

/// Malformed input files or datasets violating structural/support invariants.
/// `record()` is the offending 0-based record index when one is known.
class DataError : public std::runtime_error {
public:
    static constexpr std::size_t no_record = static_cast<std::size_t>(-1);

    explicit DataError(const std::string& msg, std::size_t record = no_record)
        : std::runtime_error(msg), record_(record) {}

    std::size_t record() const noexcept { return record_; }

private:
    std::size_t record_;
};

/// An interval carries no probability mass under the current parameters,
/// i.e. F(upper) - F(lower) underflows to zero.
class ZeroMassError : public std::runtime_error {
public:
    static constexpr std::size_t no_index = static_cast<std::size_t>(-1);

    explicit ZeroMassError(const std::string& msg, std::size_t obs_index = no_index)
        : std::runtime_error(msg), obs_index_(obs_index) {}

    std::size_t obs_index() const noexcept { return obs_index_; }

private:
    std::size_t obs_index_;
};

/// An M-step produced a degenerate parameter (zero variance / zero scale),
/// which would make the next E-step's conditional density undefined.
class DegenerateMStepError : public std::runtime_error {
public:
    explicit DegenerateMStepError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The Weibull shape equation has no unique root (all samples equal, or
/// numerically indistinguishable from equal).
class NoUniqueRootError : public std::runtime_error {
public:
    explicit NoUniqueRootError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qem
