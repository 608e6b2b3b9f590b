#include "fdecon/error.hpp"

namespace fdecon {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::IllPosedKernel: return "IllPosedKernel";
    case ErrorCode::InsufficientRange: return "InsufficientRange";
    case ErrorCode::LevelTooCoarse: return "LevelTooCoarse";
    case ErrorCode::LevelTooFine: return "LevelTooFine";
    case ErrorCode::Index: return "IndexError";
    case ErrorCode::Numerical: return "NumericalError";
    case ErrorCode::Io: return "IoError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + message), code_(code), module_(std::move(module)) {}

}  // namespace fdecon
