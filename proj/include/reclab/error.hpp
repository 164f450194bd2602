#pragma once

#include <stdexcept>
#include <string>

namespace reclab {

enum class ErrorKind {
    Structural,          // mismatched spaces, lengths, malformed inputs
    InvalidWeight,       // non-positive or non-finite weight sample
    SemiflowDomain,      // semiflow evaluated outside its domain
    InvalidRotation,     // |lambda| != 1
    Size,                // matrix cap exceeded
    Numeric,             // NaN / overflow in an iterative estimator
    OracleUnavailable,   // pullback needs an inverse that is not available
    ConstructionStalled, // nested-ball builder found no witness at some stage
    Precondition,        // a documented precondition was not certified
    CriterionUnavailable,
    Validation,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace reclab
