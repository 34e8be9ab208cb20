#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyspline {

enum class ErrorCode {
    InvalidMesh,
    NonManifoldEdge,
    InconsistentOrientation,
    SeparationViolated,
    NotStarShaped,
    MergeFailed,
    NotCompatible,
    CenterInsidePolygon,
    RankDeficient,
    InfeasibleConstraints,
    SingularFit,
    DegenerateJacobian,
    NotConverged,
    NotSPD,
    TooLarge,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit path) can react without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace polyspline
