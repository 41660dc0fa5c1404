#pragma once

#include <Eigen/Dense>

#include "qtoken/rng.hpp"

namespace qtoken {

/// Single-mode Gaussian state: quadrature mean (x, p) and symmetric 2x2
/// covariance. Vacuum variance is 0.25 per quadrature throughout, so the
/// uncertainty relation reads det(cov) >= 1/16.
struct GaussianState {
  static constexpr double kVacuumVariance = 0.25;
  static constexpr double kSymTol = 1e-12;
  static constexpr double kDetTol = 1e-12;

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity() * kVacuumVariance;

  GaussianState() = default;
  GaussianState(const Eigen::Vector2d& mean_in, const Eigen::Matrix2d& cov_in);

  static GaussianState vacuum() { return {}; }

  /// <a^dagger a> of the state.
  double mean_photon_number() const;

  /// Variance of the most-squeezed quadrature direction.
  double min_variance() const;
};

/// Shift the quadrature mean; covariance untouched.
GaussianState displace(const GaussianState& g, double dx, double dp);

/// Symplectic squeeze: covariance -> S cov S^T with
/// S = R(angle) diag(e^-r, e^+r) R(-angle); mean transforms by S as well.
/// angle = 0 squeezes the x quadrature.
GaussianState squeeze(const GaussianState& g, double r, double angle);

/// S = -10 log10(variance / 0.25), dB referenced to vacuum.
double squeezing_level_db(double variance);

/// Uhlmann fidelity of two single-mode Gaussian states in closed form
/// (valid for pure and mixed states).
double fidelity_gaussian(const GaussianState& a, const GaussianState& b);

/// One heterodyne quadrature pair: Gaussian draw with covariance
/// cov + added_noise_sq * I.
Eigen::Vector2d heterodyne_draw(const GaussianState& g, double added_noise_sq,
                                Rng& rng);

}  // namespace qtoken
