#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dmr {

// Both barriers firing at one node; only possible when the gap assumption
// on the constraint pair is violated.
struct GapViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root not bracketed after bounded outward expansion.
struct RootBracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegressionSingular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteValue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnsembleMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Picard loop hit max_picard_iters before the tolerance; carries the
// history of successive sup mean-square distances.
struct PicardNotConverged : std::runtime_error {
    std::vector<double> history;
    PicardNotConverged(const std::string& msg, std::vector<double> h)
        : std::runtime_error(msg), history(std::move(h)) {}
};

}  // namespace dmr
