#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mhdbl {

enum class ErrorKind {
    UnsupportedOrder,
    GridTooCoarse,
    OrderTooLow,
    ShapeMismatch,
    OutflowBlowup,
    DegenerateField,
    StepTooLarge,
    NumericalBlowup,
    LowerBoundLost,
    NoContraction,
    IncompatibleData,
    ProfileConstructionFailed,
    BadParameters,
    CriticalCurveLost,
    EigenpairNotFound,
    CrossValidationFailed,
    LayerUnderResolved,
    DegenerateDenominator,
    InsufficientData,
    ParseError,
    ValidationErrors,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide failure. The kind decides the CLI exit code; the message carries
/// whatever location data the failing operation had (time, node, etc).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Failure carrying a time and a node, used for blow-up and lower-bound loss.
class LocatedError : public Error {
public:
    LocatedError(ErrorKind kind, const std::string& what, double t, double x, double y)
        : Error(kind, what + " at t=" + std::to_string(t) + " x=" + std::to_string(x) +
                          " y=" + std::to_string(y)),
          t_(t), x_(x), y_(y) {}

    double t() const noexcept { return t_; }
    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }

private:
    double t_, x_, y_;
};

}  // namespace mhdbl
