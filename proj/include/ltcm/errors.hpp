#pragma once

#include <stdexcept>
#include <string>

namespace ltcm {

// Typed failures. Never encoded as sentinel numbers.
struct LtcmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Capped-precision arithmetic can no longer certify the requested digits.
// Recoverable: retry at doubled precision (see with_precision_escalation).
struct PrecisionExhausted : LtcmError {
    using LtcmError::LtcmError;
};

struct DomainError : LtcmError {
    using LtcmError::LtcmError;
};

struct SingularMatrix : LtcmError {
    using LtcmError::LtcmError;
};

// A required inverse does not exist (degenerate input, rejected not regularized).
struct DegenerateElement : LtcmError {
    using LtcmError::LtcmError;
};

// Galois-stability check failed: a value that must lie in the base field does not.
struct CoefficientNotRational : LtcmError {
    using LtcmError::LtcmError;
};

// Internal consistency failure of a reduced-norm computation.
struct NotRational : LtcmError {
    using LtcmError::LtcmError;
};

struct NotIrreducible : LtcmError {
    using LtcmError::LtcmError;
};

struct HeightMismatch : LtcmError {
    using LtcmError::LtcmError;
};

struct DeltaNormMismatch : LtcmError {
    using LtcmError::LtcmError;
};

struct InfiniteIntersection : LtcmError {
    using LtcmError::LtcmError;
};

struct SingularOrbit : LtcmError {
    using LtcmError::LtcmError;
};

struct IrregularElement : LtcmError {
    using LtcmError::LtcmError;
};

struct NoIntegralRepresentative : LtcmError {
    using LtcmError::LtcmError;
};

// Resource limits (CLI exit code 3).
struct ResourceError : LtcmError {
    using LtcmError::LtcmError;
};

struct EnumerationTooLarge : ResourceError {
    using ResourceError::ResourceError;
};

struct BudgetExceeded : ResourceError {
    using ResourceError::ResourceError;
};

struct ConfigError : LtcmError {
    using LtcmError::LtcmError;
};

} // namespace ltcm
