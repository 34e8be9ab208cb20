#include "polyspline/error.hpp"

namespace polyspline {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::SeparationViolated: return "SeparationViolated";
    case ErrorCode::NotStarShaped: return "NotStarShaped";
    case ErrorCode::MergeFailed: return "MergeFailed";
    case ErrorCode::NotCompatible: return "NotCompatible";
    case ErrorCode::CenterInsidePolygon: return "CenterInsidePolygon";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::DegenerateJacobian: return "DegenerateJacobian";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

} // namespace polyspline
