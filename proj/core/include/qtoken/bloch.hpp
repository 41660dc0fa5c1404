#pragma once

#include <Eigen/Dense>

#include "qtoken/channel.hpp"
#include "qtoken/rng.hpp"

namespace qtoken {

/// Pure qubit as a point on the Bloch sphere; theta in [0, pi], phi in
/// [0, 2*pi). theta = 0 is |0>.
struct PureQubit {
  double theta = 0.0;
  double phi = 0.0;

  PureQubit() = default;
  PureQubit(double theta_in, double phi_in);

  Eigen::Vector3d bloch() const;
  Eigen::Vector2cd state_vector() const;

  static PureQubit from_bloch(const Eigen::Vector3d& unit);
  static PureQubit haar_random(Rng& rng);  // uniform on the sphere

  static PureQubit zero() { return {0.0, 0.0}; }
  static PureQubit one();
  static PureQubit plus();
  static PureQubit minus();
};

/// |<a|b>|^2 = cos^2(delta/2) with delta the Bloch angle between the axes.
double overlap_pure(const PureQubit& a, const PureQubit& b);

/// Possibly mixed qubit held as a Bloch vector (|r| <= 1). This is the
/// workhorse representation for token states: channels act affinely on the
/// vector and projective measurements collapse it in place.
struct BlochQubit {
  Eigen::Vector3d r = Eigen::Vector3d(0, 0, 1);  // |0>

  BlochQubit() = default;
  explicit BlochQubit(const PureQubit& q) : r(q.bloch()) {}
  explicit BlochQubit(const Eigen::Vector3d& v) : r(v) {}

  /// Probability of outcome 1 (the +axis eigenstate) when measured along
  /// the given unit axis: (1 + r . axis) / 2.
  double prob_along(const Eigen::Vector3d& axis) const;

  /// Projective measurement along `axis`; collapses to the outcome
  /// eigenstate. Probabilities within 1e-12 of 0 or 1 are snapped so
  /// eigenstate measurements are exact.
  int measure_along(const Eigen::Vector3d& axis, Rng& rng);

  void apply(const NoiseChannel& ch);
};

/// Projective measurement of a pure or mixed qubit along a pure axis.
/// Returns 1 with probability prob_along (stateless form, no collapse).
int measure_projective(const PureQubit& state, const PureQubit& axis, Rng& rng);
int measure_projective(BlochQubit& state, const PureQubit& axis, Rng& rng);

}  // namespace qtoken
