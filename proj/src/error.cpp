#include "recur2d/error.hpp"

namespace recur2d {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotPrimitive: return "NotPrimitive";
        case ErrorCode::RadiusMismatch: return "RadiusMismatch";
        case ErrorCode::InadmissibleWindow: return "InadmissibleWindow";
        case ErrorCode::EigenSolverFailure: return "EigenSolverFailure";
        case ErrorCode::SingularFundamentalMatrix: return "SingularFundamentalMatrix";
        case ErrorCode::NonzeroDrift: return "NonzeroDrift";
        case ErrorCode::SingularCovariance: return "SingularCovariance";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NotMaxEntropy: return "NotMaxEntropy";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::DegenerateDesign: return "DegenerateDesign";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace recur2d
