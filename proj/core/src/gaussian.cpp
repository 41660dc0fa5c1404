#include "qtoken/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace qtoken {

GaussianState::GaussianState(const Eigen::Vector2d& mean_in,
                             const Eigen::Matrix2d& cov_in)
    : mean(mean_in), cov(cov_in) {
  if (std::abs(cov(0, 1) - cov(1, 0)) > kSymTol)
    throw std::invalid_argument("GaussianState: covariance not symmetric");
  // Symmetrize the rounding residue before the determinant check.
  cov(0, 1) = cov(1, 0) = (cov(0, 1) + cov(1, 0)) / 2.0;
  if (cov(0, 0) <= 0.0 || cov(1, 1) <= 0.0 || cov.determinant() <= 0.0)
    throw std::invalid_argument("GaussianState: covariance not positive definite");
  if (cov.determinant() < 1.0 / 16.0 - kDetTol)
    throw std::invalid_argument(
        "GaussianState: det(cov) violates the uncertainty relation");
}

double GaussianState::mean_photon_number() const {
  // x = (a + a^dag)/2 convention: <x^2> + <p^2> = (2n + 1)/2.
  return cov.trace() + mean.squaredNorm() - 0.5;
}

double GaussianState::min_variance() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

GaussianState displace(const GaussianState& g, double dx, double dp) {
  GaussianState out = g;
  out.mean += Eigen::Vector2d(dx, dp);
  return out;
}

GaussianState squeeze(const GaussianState& g, double r, double angle) {
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  Eigen::Matrix2d s = rot *
                      Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal() *
                      rot.transpose();
  return GaussianState(s * g.mean, s * g.cov * s.transpose());
}

double squeezing_level_db(double variance) {
  if (variance <= 0.0)
    throw std::invalid_argument("squeezing_level_db: variance must be > 0");
  return -10.0 * std::log10(variance / GaussianState::kVacuumVariance);
}

double fidelity_gaussian(const GaussianState& a, const GaussianState& b) {
  // Closed form for single-mode Gaussians with covariances rescaled so the
  // vacuum is the identity matrix:
  //   F = 2 exp(-du^T (A+B)^{-1} du / 2) / (sqrt(D + d) - sqrt(d)),
  //   D = det(A+B), d = (det A - 1)(det B - 1).
  const Eigen::Matrix2d A = a.cov / GaussianState::kVacuumVariance;
  const Eigen::Matrix2d B = b.cov / GaussianState::kVacuumVariance;
  const Eigen::Vector2d du = (a.mean - b.mean) / 0.5;
  const Eigen::Matrix2d sum = A + B;
  const double big_delta = sum.determinant();
  const double small_delta =
      std::max(0.0, (A.determinant() - 1.0) * (B.determinant() - 1.0));
  const double denom = std::sqrt(big_delta + small_delta) - std::sqrt(small_delta);
  const double quad = du.dot(sum.inverse() * du);
  const double f = 2.0 / denom * std::exp(-0.5 * quad);
  return std::clamp(f, 0.0, 1.0);
}

Eigen::Vector2d heterodyne_draw(const GaussianState& g, double added_noise_sq,
                                Rng& rng) {
  Eigen::Matrix2d total = g.cov;
  total(0, 0) += added_noise_sq;
  total(1, 1) += added_noise_sq;
  const Eigen::Matrix2d chol = total.llt().matrixL();
  const Eigen::Vector2d z(rng.normal(), rng.normal());
  return g.mean + chol * z;
}

}  // namespace qtoken
