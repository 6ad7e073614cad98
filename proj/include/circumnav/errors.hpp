#pragma once

#include <stdexcept>
#include <string>

namespace circumnav {

// Error categories map to CLI exit codes (see tools/).
enum class ErrorCategory : int {
    generic = 1,
    config = 2,     // parse / schema / validation
    invariant = 3,  // runtime invariant or assumption violated
    io = 4,
    data = 5,       // insufficient or empty data for an analysis
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// A vector too short to define a direction or angle.
struct ZeroVector : Error {
    explicit ZeroVector(const std::string& msg)
        : Error(ErrorCategory::invariant, msg) {}
};

// Agent coincides with the estimated centre; the bearing is undefined.
struct SingularBearing : Error {
    explicit SingularBearing(const std::string& msg)
        : Error(ErrorCategory::invariant, msg) {}
};

// A state component became NaN or Inf during integration.
struct NonFiniteState : Error {
    explicit NonFiniteState(const std::string& msg)
        : Error(ErrorCategory::invariant, msg) {}
};

// A simulation invariant failed (strict mode aborts the run with this).
struct InvariantViolation : Error {
    explicit InvariantViolation(const std::string& msg)
        : Error(ErrorCategory::invariant, msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg)
        : Error(ErrorCategory::config, msg) {}
};

// Structurally invalid config: unknown key, wrong type, missing field.
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg)
        : Error(ErrorCategory::config, msg) {}
};

// Well-formed config with physically inadmissible values.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg)
        : Error(ErrorCategory::config, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg)
        : Error(ErrorCategory::io, msg) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& msg)
        : Error(ErrorCategory::data, msg) {}
};

struct EmptyWindow : Error {
    explicit EmptyWindow(const std::string& msg)
        : Error(ErrorCategory::data, msg) {}
};

}  // namespace circumnav
