#include "qtoken/density_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace qtoken {

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1 || m_.rows() > kMaxDim)
    throw std::invalid_argument("DensityMatrix: dim must be in [1, 64]");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
    throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-10");
  if (std::abs(m_.trace().real() - 1.0) > kTraceTol ||
      std::abs(m_.trace().imag()) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace != 1 within 1e-10");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigTol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
}

DensityMatrix DensityMatrix::from_state_vector(const Eigen::VectorXcd& psi) {
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0) throw std::invalid_argument("from_state_vector: zero vector");
  Eigen::VectorXcd u = psi / std::sqrt(n2);
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::from_pure_qubit(const PureQubit& q) {
  return from_state_vector(q.state_vector());
}

DensityMatrix DensityMatrix::from_bloch(const Eigen::Vector3d& r) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  m << (1.0 + r.z()) / 2.0, (r.x() - 1i * r.y()) / 2.0,
      (r.x() + 1i * r.y()) / 2.0, (1.0 - r.z()) / 2.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / double(dim));
}

Eigen::Vector3d DensityMatrix::bloch() const {
  if (dim() != 2) throw std::invalid_argument("bloch(): dim 2 only");
  return {2.0 * m_(1, 0).real(), 2.0 * m_(1, 0).imag(),
          (m_(0, 0) - m_(1, 1)).real()};
}

namespace {

// PSD square root with eigenvalue clipping at -1e-9.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw std::invalid_argument("fidelity_dm: input not PSD");
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

double fidelity_dm(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("fidelity_dm: dimension mismatch");
  const Eigen::MatrixXcd sr = psd_sqrt(rho.entries());
  const Eigen::MatrixXcd inner = sr * sigma.entries() * sr;
  // inner is PSD up to rounding; its sqrt trace gives sqrt(F).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      (inner + inner.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  // Rounding leaves the zero eigenvalues of low-rank products at ~1e-16;
  // taking their square roots would each contribute ~1e-8 to the trace, so
  // they are floored at a scale-relative cutoff first.
  const double cutoff =
      1e-13 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  double tr = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev > cutoff) tr += std::sqrt(ev);
  }
  return std::clamp(tr * tr, 0.0, 1.0);
}

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& ch) {
  const int d = rho.dim();
  const Eigen::MatrixXcd& m = rho.entries();
  switch (ch.kind) {
    case NoiseChannel::Kind::identity:
      return rho;
    case NoiseChannel::Kind::depolarizing: {
      const double p = ch.parameter;
      return DensityMatrix((1.0 - p) * m +
                           p * Eigen::MatrixXcd::Identity(d, d) / double(d));
    }
    case NoiseChannel::Kind::erasure: {
      // Lost weight is accounted as the maximally mixed state so the map
      // stays trace preserving; heralded loss is sampled elsewhere.
      const double eta = ch.parameter;
      return DensityMatrix(eta * m + (1.0 - eta) *
                                         Eigen::MatrixXcd::Identity(d, d) /
                                         double(d));
    }
    case NoiseChannel::Kind::dephasing: {
      if (d != 2)
        throw std::invalid_argument("apply_channel: dephasing is a qubit channel");
      Eigen::MatrixXcd out = m;
      out(0, 1) *= 1.0 - ch.parameter;
      out(1, 0) *= 1.0 - ch.parameter;
      return DensityMatrix(out);
    }
    case NoiseChannel::Kind::amplitude_damping: {
      if (d != 2)
        throw std::invalid_argument(
            "apply_channel: amplitude damping is a qubit channel");
      const double g = ch.parameter;
      Eigen::Matrix2cd k0, k1;
      k0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - g);
      k1 << 0.0, std::sqrt(g), 0.0, 0.0;
      return DensityMatrix(k0 * m * k0.adjoint() + k1 * m * k1.adjoint());
    }
  }
  return rho;
}

int measure_projective(const DensityMatrix& rho, const PureQubit& axis,
                       Rng& rng) {
  if (rho.dim() != 2)
    throw std::invalid_argument("measure_projective: dim 2 only");
  BlochQubit q(rho.bloch());
  return q.measure_along(axis.bloch(), rng);
}

}  // namespace qtoken
