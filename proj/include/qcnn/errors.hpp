#pragma once

#include <stdexcept>
#include <string>

namespace qcnn {

// Error taxonomy maps onto the CLI exit codes: config/usage -> 2,
// data/files -> 3, numerical -> 4. Sweep rows that fail surface as exit 5
// at the CLI layer.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration, precondition, or usage: bad qubit counts, gate
// targets, feature ranges, malformed config keys.
struct config_error : error {
    using error::error;
};

// Dataset problems: parse failures, missing files, digest mismatches,
// unreachable mirrors.
struct data_error : error {
    using error::error;
};

// Non-finite values, impossible measurement branches, diverging training.
struct numerical_error : error {
    using error::error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitSweepPartial = 5;

} // namespace qcnn
