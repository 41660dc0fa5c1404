#include "qtoken/bloch.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtoken {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSnapTol = 1e-12;
}  // namespace

PureQubit::PureQubit(double theta_in, double phi_in)
    : theta(theta_in), phi(phi_in) {
  if (!(theta >= 0.0 && theta <= kPi))
    throw std::invalid_argument("PureQubit: theta must be in [0, pi]");
  if (!(phi >= 0.0 && phi < 2.0 * kPi))
    throw std::invalid_argument("PureQubit: phi must be in [0, 2*pi)");
}

Eigen::Vector3d PureQubit::bloch() const {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Eigen::Vector2cd PureQubit::state_vector() const {
  using namespace std::complex_literals;
  Eigen::Vector2cd v;
  v << std::cos(theta / 2.0),
      std::exp(1i * phi) * std::sin(theta / 2.0);
  return v;
}

PureQubit PureQubit::from_bloch(const Eigen::Vector3d& unit) {
  const Eigen::Vector3d u = unit.normalized();
  double theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
  double phi = std::atan2(u.y(), u.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return {theta, phi};
}

PureQubit PureQubit::haar_random(Rng& rng) {
  // cos(theta) uniform on [-1, 1], phi uniform on [0, 2*pi).
  const double c = rng.uniform(-1.0, 1.0);
  double phi = rng.uniform(0.0, 2.0 * kPi);
  if (phi >= 2.0 * kPi) phi = 0.0;
  return {std::acos(c), phi};
}

PureQubit PureQubit::one() { return {kPi, 0.0}; }
PureQubit PureQubit::plus() { return {kPi / 2.0, 0.0}; }
PureQubit PureQubit::minus() { return {kPi / 2.0, kPi}; }

double overlap_pure(const PureQubit& a, const PureQubit& b) {
  const double d = std::clamp(a.bloch().dot(b.bloch()), -1.0, 1.0);
  return (1.0 + d) / 2.0;
}

double BlochQubit::prob_along(const Eigen::Vector3d& axis) const {
  return std::clamp((1.0 + r.dot(axis)) / 2.0, 0.0, 1.0);
}

int BlochQubit::measure_along(const Eigen::Vector3d& axis, Rng& rng) {
  double p = prob_along(axis);
  if (p > 1.0 - kSnapTol) p = 1.0;
  if (p < kSnapTol) p = 0.0;
  const int outcome = rng.bernoulli(p) ? 1 : 0;
  r = outcome == 1 ? axis : Eigen::Vector3d(-axis);
  return outcome;
}

void BlochQubit::apply(const NoiseChannel& ch) {
  switch (ch.kind) {
    case NoiseChannel::Kind::identity:
      break;
    case NoiseChannel::Kind::depolarizing:
      r *= 1.0 - ch.parameter;
      break;
    case NoiseChannel::Kind::dephasing:
      // Off-diagonals scale by (1 - p): transverse Bloch components.
      r.x() *= 1.0 - ch.parameter;
      r.y() *= 1.0 - ch.parameter;
      break;
    case NoiseChannel::Kind::amplitude_damping: {
      const double g = ch.parameter;
      const double s = std::sqrt(1.0 - g);
      r.x() *= s;
      r.y() *= s;
      r.z() = g + (1.0 - g) * r.z();
      break;
    }
    case NoiseChannel::Kind::erasure:
      throw std::invalid_argument(
          "BlochQubit: erasure is a heralded loss event, sample it with "
          "bernoulli(eta) at the container level");
  }
}

int measure_projective(const PureQubit& state, const PureQubit& axis,
                       Rng& rng) {
  BlochQubit q(state);
  return q.measure_along(axis.bloch(), rng);
}

int measure_projective(BlochQubit& state, const PureQubit& axis, Rng& rng) {
  return state.measure_along(axis.bloch(), rng);
}

std::string to_string(NoiseChannel::Kind k) {
  switch (k) {
    case NoiseChannel::Kind::identity: return "identity";
    case NoiseChannel::Kind::depolarizing: return "depolarizing";
    case NoiseChannel::Kind::dephasing: return "dephasing";
    case NoiseChannel::Kind::amplitude_damping: return "amplitude-damping";
    case NoiseChannel::Kind::erasure: return "erasure";
  }
  return "identity";
}

NoiseChannel::Kind channel_kind_from_string(const std::string& s) {
  if (s == "identity") return NoiseChannel::Kind::identity;
  if (s == "depolarizing") return NoiseChannel::Kind::depolarizing;
  if (s == "dephasing") return NoiseChannel::Kind::dephasing;
  if (s == "amplitude-damping") return NoiseChannel::Kind::amplitude_damping;
  if (s == "erasure") return NoiseChannel::Kind::erasure;
  throw std::invalid_argument("unknown channel kind: " + s);
}

}  // namespace qtoken
