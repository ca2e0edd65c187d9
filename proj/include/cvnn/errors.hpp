#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvnn {

// Shape mismatch between operands.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid argument values (zero widths, odd depth, budget too small, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numeric probe (finite differences, activation) produced a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Complex tanh evaluated too close to one of its poles.
class PoleError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// Tape and model disagree (layer count, shapes).
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed data file. Carries the byte offset at which parsing failed.
class DataFormatError : public std::runtime_error {
public:
    DataFormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace cvnn
