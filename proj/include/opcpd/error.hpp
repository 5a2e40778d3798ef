#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opcpd {

// Raised for malformed parameters: bad permutation, out-of-range code,
// invalid split, non-increasing map, inconsistent configuration.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A sample that is NaN or infinite. `position` is the 0-based index of the
// offending value within the array that was being processed.
class InvalidSample : public std::runtime_error {
public:
    InvalidSample(std::size_t position, double value);

    std::size_t position() const noexcept { return position_; }
    double value() const noexcept { return value_; }

private:
    std::size_t position_;
    double value_;
};

// Not enough data for the requested operation. `required` is the minimum
// length (in the unit named by `unit`, e.g. "samples" or "patterns").
class InsufficientData : public std::runtime_error {
public:
    InsufficientData(std::size_t available, std::size_t required, std::string unit);

    std::size_t available() const noexcept { return available_; }
    std::size_t required() const noexcept { return required_; }
    const std::string& unit() const noexcept { return unit_; }

private:
    std::size_t available_;
    std::size_t required_;
    std::string unit_;
};

} // namespace opcpd
