#include "mosaic/error.hpp"

namespace mosaic {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidIntrinsics: return "invalid-intrinsics";
        case ErrorCode::InvalidCoverage: return "invalid-coverage";
        case ErrorCode::InvalidPoint: return "invalid-point";
        case ErrorCode::GeometryInconsistency: return "geometry-inconsistency";
        case ErrorCode::InvalidContext: return "invalid-context";
        case ErrorCode::InvalidQuery: return "invalid-query";
        case ErrorCode::EmptyIndex: return "empty-index";
        case ErrorCode::DuplicateId: return "duplicate-id";
        case ErrorCode::InsufficientCandidates: return "insufficient-candidates";
        case ErrorCode::MissingService: return "missing-service";
        case ErrorCode::InsufficientData: return "insufficient-data";
        case ErrorCode::ConvergenceFailure: return "convergence-failure";
        case ErrorCode::TrainingDiverged: return "training-diverged";
        case ErrorCode::ShapeMismatch: return "shape-mismatch";
        case ErrorCode::EmptyEvaluation: return "empty-evaluation";
        case ErrorCode::NoComposition: return "no-composition";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace mosaic
