#include "qkrspb/error.hpp"

namespace qkrspb {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::RefuseTooLarge: return "RefuseTooLarge";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace qkrspb
