#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace egfem {

enum class ErrorCode {
    InvalidArgument,
    InterfaceOnNode,
    TwoInterfacesOneElement,
    LinearDependence,
    EvaluationFailure,
    OutOfDomain,
    SingularSystem,
    UnsupportedOrder,
    DegenerateSubinterval,
    NonPositiveDiffusivity,
    MaxIterations,
    NonpositiveDiagonal,
    SingularMatrix,
    DimensionMismatch,
    InterfaceAtSingularAlpha,
    ReproducingPropertyFailed,
    MismatchBeyondTolerance,
    MissingExact,
    IoFailure,
    UnknownProblem,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InterfaceOnNode: return "InterfaceOnNode";
    case ErrorCode::TwoInterfacesOneElement: return "TwoInterfacesOneElement";
    case ErrorCode::LinearDependence: return "LinearDependence";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::DegenerateSubinterval: return "DegenerateSubinterval";
    case ErrorCode::NonPositiveDiffusivity: return "NonPositiveDiffusivity";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonpositiveDiagonal: return "NonpositiveDiagonal";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InterfaceAtSingularAlpha: return "InterfaceAtSingularAlpha";
    case ErrorCode::ReproducingPropertyFailed: return "ReproducingPropertyFailed";
    case ErrorCode::MismatchBeyondTolerance: return "MismatchBeyondTolerance";
    case ErrorCode::MissingExact: return "MissingExact";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    }
    return "Unknown";
}

/// Library exception. Every failure raised by egfem carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what)
{
    if (!condition) {
        throw Error(code, what);
    }
}

} // namespace egfem
