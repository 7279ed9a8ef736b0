#pragma once

#include <stdexcept>
#include <string>

namespace psdpg {

// Vector or matrix dimensions disagree with a net, layout or memory shape.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested structure is impossible (zero-width layer, tau outside [0,1],
// shared variant on a non-uniform environment, malformed net file, ...).
struct InvalidSpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values reached a numeric kernel; the offending step is aborted
// with no state mutated.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ReplayMemory::sample asked for more transitions than are stored.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config text problems. line is 1-based; 0 when no line is attributable.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace psdpg
