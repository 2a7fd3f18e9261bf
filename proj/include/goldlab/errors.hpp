#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace goldlab {

// Error taxonomy mirrors the CLI exit-code contract:
//   ConfigError -> 1, StarvationError -> 3, everything else -> 2.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape/dimension mismatch between tensors or layers.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation called out of order (e.g. backward without forward).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed binary or text input; carries the byte offset where parsing failed.
struct FormatError : std::runtime_error {
    FormatError(const std::string& msg, std::size_t byte_offset)
        : std::runtime_error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    explicit FormatError(const std::string& msg) : std::runtime_error(msg), offset(0) {}
    std::size_t offset;
};

// NaN/Inf surfaced where the contract requires finite values, or degenerate
// statistics (e.g. sigma_C = 0 in the balanced estimator).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejection-sampling acceptance collapsed below the survivable floor.
struct StarvationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace goldlab
