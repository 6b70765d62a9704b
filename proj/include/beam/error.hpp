#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace beam {

enum class ErrorKind {
    invalid_argument,  // malformed settings or arguments
    off_grid,          // a value that is not a member of an axis grid
    out_of_range,      // index or value outside the space
    overflow,          // cardinality does not fit in 64 bits
    duplicate,         // configuration already observed
    not_pending,       // outcome for a configuration that was never suggested
    budget_exhausted,  // t >= T
    over_constrained,  // no candidate survives the constraints
    io,                // filesystem failures
    format,            // unreadable or invariant-violating campaign file
    version,           // campaign file schema version mismatch
    conflict,          // stale state-version token
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace beam
