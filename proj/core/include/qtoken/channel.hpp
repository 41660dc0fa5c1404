#pragma once

#include <stdexcept>
#include <string>

namespace qtoken {

/// Phenomenological single-parameter noise channels. The parameter is a
/// probability for depolarizing/dephasing, a decay probability gamma for
/// amplitude damping, and a survival probability eta for erasure.
struct NoiseChannel {
  enum class Kind { identity, depolarizing, dephasing, amplitude_damping, erasure };

  Kind kind = Kind::identity;
  double parameter = 0.0;

  static NoiseChannel identity() { return {Kind::identity, 0.0}; }
  static NoiseChannel depolarizing(double p) { return checked(Kind::depolarizing, p); }
  static NoiseChannel dephasing(double p) { return checked(Kind::dephasing, p); }
  static NoiseChannel amplitude_damping(double gamma) {
    return checked(Kind::amplitude_damping, gamma);
  }
  static NoiseChannel erasure(double eta) { return checked(Kind::erasure, eta); }

  static NoiseChannel checked(Kind k, double p) {
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("NoiseChannel: parameter must be in [0,1]");
    return {k, p};
  }
};

std::string to_string(NoiseChannel::Kind k);
NoiseChannel::Kind channel_kind_from_string(const std::string& s);

}  // namespace qtoken
