#pragma once

#include <stdexcept>
#include <string>

namespace fdecon {

// Numeric values are shared with the C API status codes in fdecon.h.
enum class ErrorCode : int {
  Config = 1,
  IllPosedKernel = 2,
  InsufficientRange = 3,
  LevelTooCoarse = 4,
  LevelTooFine = 5,
  Index = 6,
  Numerical = 7,
  Io = 8,
};

const char* error_code_name(ErrorCode code) noexcept;

/// Library-wide exception. `module` names the subsystem that raised it so
/// that front ends can report "meyer: level 9 band exceeds Nyquist" style
/// messages without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace fdecon
