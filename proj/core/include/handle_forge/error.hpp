#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace handle_forge {

enum class ErrorCode {
  DomainEmpty,
  OutOfDomain,
  OutOfRange,
  NotMonotone,
  NotPositive,
  IntegrationError,
  SingularPoint,
  NotOnHypersurface,
  ShapeError,
  NotInvertible,
  NotStronglyPsh,
  WrongRegime,
  EpsilonTooLarge,
  DegenerateConstants,
  VerificationFailed,
  RadiusTooLarge,
  InvalidArgument,
  FormatError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` distinguishes failure modes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace handle_forge
