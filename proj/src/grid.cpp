#include "mhdbl/grid.hpp"

#include <cmath>
#include <string>

namespace mhdbl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::OrderTooLow: return "OrderTooLow";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::OutflowBlowup: return "OutflowBlowup";
        case ErrorKind::DegenerateField: return "DegenerateField";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
        case ErrorKind::NumericalBlowup: return "NumericalBlowup";
        case ErrorKind::LowerBoundLost: return "LowerBoundLost";
        case ErrorKind::NoContraction: return "NoContraction";
        case ErrorKind::IncompatibleData: return "IncompatibleData";
        case ErrorKind::ProfileConstructionFailed: return "ProfileConstructionFailed";
        case ErrorKind::BadParameters: return "BadParameters";
        case ErrorKind::CriticalCurveLost: return "CriticalCurveLost";
        case ErrorKind::EigenpairNotFound: return "EigenpairNotFound";
        case ErrorKind::CrossValidationFailed: return "CrossValidationFailed";
        case ErrorKind::LayerUnderResolved: return "LayerUnderResolved";
        case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationErrors: return "ValidationErrors";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Grid::Grid(int nx, int ny, double y_max, double y_stretch)
    : nx_(nx), ny_(ny), y_max_(y_max), s_(y_stretch) {
    if (nx < 1 || ny < 2 || !(y_max > 0.0))
        throw Error(ErrorKind::BadParameters,
                    "grid needs nx >= 1, ny >= 2, y_max > 0 (got nx=" + std::to_string(nx) +
                        ", ny=" + std::to_string(ny) + ")");
    if (y_stretch < 0.0) throw Error(ErrorKind::BadParameters, "y_stretch must be >= 0");
    y_.resize(ny);
    for (int j = 0; j < ny; ++j) {
        const double eta = static_cast<double>(j) / (ny - 1);
        y_[j] = (s_ == 0.0) ? y_max * eta : y_max * std::expm1(s_ * eta) / std::expm1(s_);
    }
    y_[0] = 0.0;
    y_[ny - 1] = y_max;
    wy_.assign(ny, 0.0);
    for (int j = 0; j + 1 < ny; ++j) {
        const double h = y_[j + 1] - y_[j];
        wy_[j] += 0.5 * h;
        wy_[j + 1] += 0.5 * h;
    }
}

}  // namespace mhdbl
