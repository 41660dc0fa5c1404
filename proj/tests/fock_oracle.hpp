// Independent Fock-basis oracle for single-mode Gaussian states.
//
// Builds the truncated number-basis density matrix of an arbitrary
// (possibly mixed) Gaussian state from its quadrature mean and covariance:
// thermal core from the Williamson symplectic eigenvalue, then squeeze,
// rotation and displacement unitaries taken as matrix exponentials of the
// usual generators. The construction is self-verifying: it recomputes the
// first and second quadrature moments from the Fock matrix and throws if
// they do not match the requested state, so any convention error here is
// caught before the oracle is used against the library.
#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qtoken/density_matrix.hpp"
#include "qtoken/gaussian.hpp"

namespace fock_oracle {

using cplx = std::complex<double>;

inline Eigen::MatrixXcd annihilation(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

// Quadratures with vacuum variance 1/4: x = (a + a^dag)/2, p = (a - a^dag)/2i.
inline Eigen::MatrixXcd quad_x(const Eigen::MatrixXcd& a) {
  return (a + a.adjoint()) / 2.0;
}
inline Eigen::MatrixXcd quad_p(const Eigen::MatrixXcd& a) {
  return (a - a.adjoint()) / cplx(0.0, 2.0);
}

// D(alpha) = exp(alpha a^dag - alpha* a), alpha = dx + i dp.
inline Eigen::MatrixXcd displacement_op(int dim, double dx, double dp) {
  const auto a = annihilation(dim);
  const cplx alpha(dx, dp);
  return (alpha * a.adjoint() - std::conj(alpha) * a).exp();
}

// S(r) = exp(r/2 (a^2 - a^dag^2)): squeezes x by e^-r.
inline Eigen::MatrixXcd squeeze_op(int dim, double r) {
  const auto a = annihilation(dim);
  return ((r / 2.0) * (a * a - a.adjoint() * a.adjoint())).exp();
}

// U(theta) = exp(+i theta a^dag a): Schroedinger-picture quadrature
// rotation by [[cos, -sin], [sin, cos]].
inline Eigen::MatrixXcd rotation_op(int dim, double theta) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n)
    u(n, n) = std::exp(cplx(0.0, theta * n));
  return u;
}

inline Eigen::MatrixXcd thermal_state(int dim, double nbar) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  if (nbar < 1e-14) {
    rho(0, 0) = 1.0;
    return rho;
  }
  for (int n = 0; n < dim; ++n)
    rho(n, n) = std::pow(nbar / (nbar + 1.0), n) / (nbar + 1.0);
  return rho;
}

struct Moments {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

inline Moments moments_of(const Eigen::MatrixXcd& rho) {
  const int dim = static_cast<int>(rho.rows());
  const auto a = annihilation(dim);
  const Eigen::MatrixXcd X = quad_x(a), P = quad_p(a);
  Moments m;
  m.mean[0] = (rho * X).trace().real();
  m.mean[1] = (rho * P).trace().real();
  const Eigen::MatrixXcd dX = X - m.mean[0] * Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd dP = P - m.mean[1] * Eigen::MatrixXcd::Identity(dim, dim);
  m.cov(0, 0) = (rho * dX * dX).trace().real();
  m.cov(1, 1) = (rho * dP * dP).trace().real();
  m.cov(0, 1) = m.cov(1, 0) = (rho * (dX * dP + dP * dX)).trace().real() / 2.0;
  return m;
}

/// Fock-truncated density matrix of the Gaussian state (mean, cov).
/// `dim` must be large enough that the truncated tail is negligible for
/// the moment self-check (`tol`).
inline qtoken::DensityMatrix gaussian_to_fock(const qtoken::GaussianState& g,
                                              int dim = 40,
                                              double tol = 1e-7) {
  const double nu = std::sqrt(g.cov.determinant());
  if (nu < 0.25 - 1e-9)
    throw std::invalid_argument("gaussian_to_fock: sub-Heisenberg covariance");
  const double nbar = std::max(0.0, (4.0 * nu - 1.0) / 2.0);

  // Williamson in one mode: cov = nu * M with det M = 1; M = O D O^T.
  const Eigen::Matrix2d M = g.cov / nu;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  Eigen::Vector2d lam = es.eigenvalues();  // ascending, lam0*lam1 = 1
  Eigen::Matrix2d O = es.eigenvectors();
  if (O.determinant() < 0.0) O.col(0) *= -1.0;
  const double r = -0.5 * std::log(lam[0]);  // squeeze of the small axis
  const double theta = std::atan2(O(1, 0), O(0, 0));

  const Eigen::MatrixXcd u = displacement_op(dim, g.mean[0], g.mean[1]) *
                             rotation_op(dim, theta) * squeeze_op(dim, r) *
                             rotation_op(dim, -theta);
  Eigen::MatrixXcd rho = u * thermal_state(dim, nbar) * u.adjoint();
  rho = (rho + rho.adjoint()) / 2.0;
  rho /= rho.trace().real();

  const Moments m = moments_of(rho);
  if ((m.mean - g.mean).cwiseAbs().maxCoeff() > tol ||
      (m.cov - g.cov).cwiseAbs().maxCoeff() > tol)
    throw std::runtime_error(
        "gaussian_to_fock: moment self-check failed (truncation too small "
        "or construction bug)");
  return qtoken::DensityMatrix(rho);
}

}  // namespace fock_oracle
