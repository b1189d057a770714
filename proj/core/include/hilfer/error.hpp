#pragma once

#include <stdexcept>
#include <string>

namespace hilfer {

/// Raised when an input violates a documented precondition. The message names the offending field.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when an algorithm cannot reach its tolerance on valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hilfer
