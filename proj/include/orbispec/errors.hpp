#pragma once

#include <stdexcept>
#include <string>

namespace orbispec {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input-validation errors: malformed or inconsistent user input.
class InputError : public Error {
public:
    using Error::Error;
};

// Internal-consistency errors: a tolerance or invariant was violated,
// which signals a bug rather than bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public InputError {
public:
    using InputError::InputError;
};

class NotOrthogonalError : public InputError {
public:
    using InputError::InputError;
};

class NonInvertibleError : public InputError {
public:
    using InputError::InputError;
};

class InconsistentTranslationError : public InputError {
public:
    using InputError::InputError;
};

class OrderCapExceededError : public InputError {
public:
    using InputError::InputError;
};

class NotFiniteOrderError : public InputError {
public:
    using InputError::InputError;
};

class BudgetExceededError : public InputError {
public:
    using InputError::InputError;
};

class BoundMismatchError : public InputError {
public:
    using InputError::InputError;
};

class KrawtchoukZeroError : public InputError {
public:
    using InputError::InputError;
};

class InvalidCodimError : public InputError {
public:
    using InputError::InputError;
};

class SchemaError : public InputError {
public:
    using InputError::InputError;
};

class ToleranceViolationError : public InternalError {
public:
    using InternalError::InternalError;
};

class ValidationFailedError : public InternalError {
public:
    using InternalError::InternalError;
};

// Short machine-readable tag used by the CLI error report.
inline const char* error_tag(const Error& e) {
    if (dynamic_cast<const SingularMatrixError*>(&e)) return "SingularMatrix";
    if (dynamic_cast<const NotOrthogonalError*>(&e)) return "NotOrthogonal";
    if (dynamic_cast<const NonInvertibleError*>(&e)) return "NonInvertible";
    if (dynamic_cast<const InconsistentTranslationError*>(&e)) return "InconsistentTranslation";
    if (dynamic_cast<const OrderCapExceededError*>(&e)) return "OrderCapExceeded";
    if (dynamic_cast<const NotFiniteOrderError*>(&e)) return "NotFiniteOrder";
    if (dynamic_cast<const BudgetExceededError*>(&e)) return "BudgetExceeded";
    if (dynamic_cast<const BoundMismatchError*>(&e)) return "BoundMismatch";
    if (dynamic_cast<const KrawtchoukZeroError*>(&e)) return "KrawtchoukZero";
    if (dynamic_cast<const InvalidCodimError*>(&e)) return "InvalidCodim";
    if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
    if (dynamic_cast<const ToleranceViolationError*>(&e)) return "ToleranceViolation";
    if (dynamic_cast<const ValidationFailedError*>(&e)) return "ValidationFailed";
    return "Error";
}

} // namespace orbispec
