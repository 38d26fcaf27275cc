#include "handle_forge/error.hpp"

namespace handle_forge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainEmpty: return "DomainEmpty";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::IntegrationError: return "IntegrationError";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::NotOnHypersurface: return "NotOnHypersurface";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotStronglyPsh: return "NotStronglyPsh";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::DegenerateConstants: return "DegenerateConstants";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace handle_forge
