#pragma once

#include <stdexcept>
#include <string>

namespace volcast {

// Error categories map 1:1 onto CLI exit codes (see tools/volcast_cli.cpp).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace volcast
