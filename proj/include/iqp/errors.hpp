#pragma once

// Error taxonomy shared across modules.
//
// std::invalid_argument is used directly for parameter/contract violations;
// the types below mark conditions callers may reasonably want to catch and
// handle separately.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iqp {

// The all-ones vector is not in the column space at hand: no secret exists.
struct no_secret_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A randomized construction exceeded its retry budget.
struct construction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A brute-force path was asked to exceed its resource cap.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested data (e.g. an obfuscation trace) was not retained.
struct unavailable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The input is structurally outside what the algorithm supports (e.g. a
// dependent candidate set for the mixture sampler).
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A text artifact failed to parse; `line` is 1-based.
struct parse_error : std::runtime_error {
    std::size_t line;

    parse_error(std::size_t at, const std::string& what)
        : std::runtime_error("line " + std::to_string(at) + ": " + what), line(at) {}
};

}  // namespace iqp
