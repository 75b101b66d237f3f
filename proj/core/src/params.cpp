#include "classd/params.hpp"

#include <cmath>
#include <string>

#include "classd/error.hpp"

namespace classd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DegenerateSpectrum: return "degenerate-spectrum";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::ResidueTooLarge: return "residue-too-large";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::TransversalityViolation: return "transversality-violation";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::NoSignChange: return "no-sign-change";
    case ErrorKind::Resonance: return "resonance";
    case ErrorKind::Saturation: return "saturation";
    case ErrorKind::NoCrossing: return "no-crossing";
    case ErrorKind::ToleranceFailure: return "tolerance-failure";
    case ErrorKind::WindowMisaligned: return "window-misaligned";
    case ErrorKind::ZeroFundamental: return "zero-fundamental";
    case ErrorKind::DivisionByZero: return "division-by-zero";
  }
  return "unknown";
}

AmplifierParams AmplifierParams::defaults(int k) {
  AmplifierParams p;
  p.k = k;
  return p;
}

double AmplifierParams::ring_frequency() const {
  const double disc = 1.0 / lc() - 1.0 / (4.0 * rc() * rc());
  return disc > 0.0 ? std::sqrt(disc) : std::nan("");
}

void AmplifierParams::validate() const {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidParameter,
                  std::string(name) + " must be finite and strictly positive");
    }
  };
  require_positive(R, "R");
  require_positive(L, "L");
  require_positive(C, "C");
  require_positive(T, "T");
  require_positive(omega1, "omega1");
  for (auto [v, name] : {std::pair{c1, "c1"}, std::pair{c2, "c2"}, std::pair{c3, "c3"}}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidParameter, std::string(name) + " must be finite");
    }
  }
  if (k != 0 && k != 1) {
    throw Error(ErrorKind::InvalidParameter, "k must be 0 or 1");
  }
  if (!(1.0 / lc() > 1.0 / (4.0 * rc() * rc()))) {
    throw Error(ErrorKind::InvalidParameter,
                "R, L, C: output filter must be underdamped (1/LC > 1/(4R^2C^2))");
  }
}

double AmplifierParams::get(std::string_view name) const {
  if (name == "R") return R;
  if (name == "L") return L;
  if (name == "C") return C;
  if (name == "T") return T;
  if (name == "c1") return c1;
  if (name == "c2") return c2;
  if (name == "c3") return c3;
  if (name == "omega1") return omega1;
  if (name == "k") return k;
  throw Error(ErrorKind::InvalidParameter, "unknown parameter '" + std::string(name) + "'");
}

void AmplifierParams::set(std::string_view name, double value) {
  if (name == "R") R = value;
  else if (name == "L") L = value;
  else if (name == "C") C = value;
  else if (name == "T") T = value;
  else if (name == "c1") c1 = value;
  else if (name == "c2") c2 = value;
  else if (name == "c3") c3 = value;
  else if (name == "omega1") omega1 = value;
  else if (name == "k") {
    if (value != 0.0 && value != 1.0) {
      throw Error(ErrorKind::InvalidParameter, "k must be 0 or 1");
    }
    k = static_cast<int>(value);
  } else {
    throw Error(ErrorKind::InvalidParameter, "unknown parameter '" + std::string(name) + "'");
  }
}

bool AmplifierParams::is_sweepable(std::string_view name) {
  for (auto n : kSweepableParams) {
    if (n == name) return true;
  }
  return false;
}

}  // namespace classd
