#pragma once

#include <Eigen/Dense>

#include "qtoken/bloch.hpp"
#include "qtoken/channel.hpp"

namespace qtoken {

/// Dense finite-dimensional density matrix, dim <= 64. Validated on
/// construction: Hermitian and unit trace within 1e-10, eigenvalues
/// >= -1e-10.
class DensityMatrix {
 public:
  static constexpr int kMaxDim = 64;
  static constexpr double kHermTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigTol = 1e-10;

  explicit DensityMatrix(Eigen::MatrixXcd entries);

  static DensityMatrix from_state_vector(const Eigen::VectorXcd& psi);
  static DensityMatrix from_pure_qubit(const PureQubit& q);
  static DensityMatrix from_bloch(const Eigen::Vector3d& r);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& entries() const { return m_; }

  Eigen::Vector3d bloch() const;  // dim 2 only

 private:
  Eigen::MatrixXcd m_;
};

/// Uhlmann fidelity F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Eigenvalues
/// are clipped at -1e-9 before the square roots. Symmetric; equals
/// |<psi|phi>|^2 on pure inputs.
double fidelity_dm(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Apply a noise channel. Depolarizing and erasure act in any dimension
/// (erasure is represented as loss to the maximally mixed state); dephasing
/// and amplitude damping are qubit channels and throw for dim != 2.
DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& ch);

/// tr(rho |axis><axis|) measurement, collapsing convention as in
/// measure_projective for Bloch qubits. dim 2 only.
int measure_projective(const DensityMatrix& rho, const PureQubit& axis,
                       Rng& rng);

}  // namespace qtoken
