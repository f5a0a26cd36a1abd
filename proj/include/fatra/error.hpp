#pragma once

#include <stdexcept>
#include <string>

namespace fatra {

// Shape disagreement between operands (op name and both shapes in the message).
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A precondition of an operation was violated.
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An op kind outside the supported primitive set.
struct UnsupportedOpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A metric whose defining groups are empty on this instance.
struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A generation target outside the achievable range.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input files.
struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite value produced where finiteness is an invariant.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fatra
