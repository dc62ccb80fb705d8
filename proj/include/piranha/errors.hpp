#pragma once

#include <stdexcept>
#include <string>

namespace piranha {

/// Dimension or structural mismatch between matrices, states and series.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A series is too short for the requested time index or horizon.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Malformed or unreadable data file (parse errors carry the line number).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite value encountered during numeric work.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace piranha
