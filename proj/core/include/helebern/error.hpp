#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helebern {

enum class ErrorCode {
  InvalidArgument,
  BallOutsideGrid,
  NoInterface,
  GridMismatch,
  SourceNotEnclosed,
  NoConvergence,
  BadRadii,
  NoSignChange,
  SourceCollision,
  ConfigMismatch,
  SolverFailure,
  DegenerateGradient,
  UnknownKey,
  MissingKey,
  BadValue,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every fatal condition in the library is reported through this type; the
// code lets callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace helebern
