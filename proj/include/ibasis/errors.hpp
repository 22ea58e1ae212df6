#pragma once

#include <stdexcept>
#include <string>

namespace ibasis {

// Failure taxonomy shared by the library and the CLI. The CLI maps each
// kind to a stable process exit code: usage problems (1), mathematical
// rejection of the input (2), resource caps (3).
enum class ErrKind {
    ZeroPolynomial,
    DivisionByZero,
    ShapeMismatch,
    ZeroOperator,
    PointMismatch,
    TruncationTooShort,
    InvalidPolicy,
    UnsupportedExponent,
    IrregularSingularity,
    CannotBoundWronskian,
    NotABasis,
    BadDenominatorShape,
    ReductionObstruction,
    NotAnOperator,
    ParseError,
    Internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}

    ErrKind kind() const { return kind_; }

    int exit_code() const {
        switch (kind_) {
        case ErrKind::IrregularSingularity:
        case ErrKind::UnsupportedExponent:
        case ErrKind::NotAnOperator:
        case ErrKind::BadDenominatorShape:
        case ErrKind::ReductionObstruction:
            return 2;
        case ErrKind::CannotBoundWronskian:
            return 3;
        default:
            return 1;
        }
    }

  private:
    ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind kind, const std::string& msg) { throw Error(kind, msg); }

} // namespace ibasis
