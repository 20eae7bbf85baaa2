#pragma once

#include <stdexcept>
#include <string>

namespace qkrspb {

enum class ErrorKind {
  InvalidState,
  InvalidInput,
  ConfigError,
  NumericalError,
  IoError,
  RefuseTooLarge,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. `kind()` lets callers
/// branch without catching each subclass.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define QKRSPB_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(ErrorKind::Name, what) {}  \
  };

QKRSPB_DEFINE_ERROR(InvalidState)
QKRSPB_DEFINE_ERROR(InvalidInput)
QKRSPB_DEFINE_ERROR(ConfigError)
QKRSPB_DEFINE_ERROR(NumericalError)
QKRSPB_DEFINE_ERROR(IoError)
QKRSPB_DEFINE_ERROR(RefuseTooLarge)

#undef QKRSPB_DEFINE_ERROR

}  // namespace qkrspb
