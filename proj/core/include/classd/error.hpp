#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace classd {

enum class ErrorKind {
  InvalidParameter,
  DegenerateSpectrum,
  UnsupportedOrder,
  ResidueTooLarge,
  SingularSystem,
  TransversalityViolation,
  Pole,
  NoSignChange,
  Resonance,
  Saturation,
  NoCrossing,
  ToleranceFailure,
  WindowMisaligned,
  ZeroFundamental,
  DivisionByZero,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace classd
