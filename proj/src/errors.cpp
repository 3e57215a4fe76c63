#include "holoq/errors.hpp"

namespace holoq {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::NonDiagonalizable: return "NonDiagonalizable";
        case ErrorCode::NearDefective: return "NearDefective";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NoReference: return "NoReference";
        case ErrorCode::OnEP: return "OnEP";
        case ErrorCode::OutOfValidity: return "OutOfValidity";
        case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
        case ErrorCode::StepTooCoarse: return "StepTooCoarse";
        case ErrorCode::LeakageTooLarge: return "LeakageTooLarge";
        case ErrorCode::NotClosed: return "NotClosed";
        case ErrorCode::EdgeTooLong: return "EdgeTooLong";
        case ErrorCode::StepDegenerate: return "StepDegenerate";
        case ErrorCode::SurfaceTouchesEP: return "SurfaceTouchesEP";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::ZeroFactor: return "ZeroFactor";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::BandExchange: return "BandExchange";
        case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    }
    return "Unknown";
}

}  // namespace holoq
