#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fock_oracle.hpp"
#include "qtoken/bloch.hpp"
#include "qtoken/density_matrix.hpp"
#include "qtoken/gaussian.hpp"
#include "qtoken/rng.hpp"
#include "qtoken/stats.hpp"

using namespace qtoken;

TEST_CASE("rng: deterministic and seed-sensitive") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 100; ++i) differs |= a2.next_u64() != c.next_u64();
  CHECK(differs);
}

TEST_CASE("rng: derived streams are distinct and reproducible") {
  Rng s0 = Rng::derive(7, 0), s1 = Rng::derive(7, 1), s0b = Rng::derive(7, 0);
  CHECK(s0.next_u64() != s1.next_u64());
  Rng s0c = Rng::derive(7, 0);
  CHECK(s0b.next_u64() == s0c.next_u64());
}

TEST_CASE("rng: uniform range and moments") {
  Rng rng(1);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("rng: uniform_int is unbiased over a non-power-of-two range") {
  Rng rng(5);
  int counts[3] = {0, 0, 0};
  const int n = 300000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_int(3)];
  for (int k = 0; k < 3; ++k)
    CHECK(double(counts[k]) / n == doctest::Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("rng: normal and poisson moments") {
  Rng rng(9);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(1).scale(0.02));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));

  double psum = 0.0;
  for (int i = 0; i < 100000; ++i) psum += rng.poisson(32.0);
  CHECK(psum / 100000 == doctest::Approx(32.0).epsilon(0.01));
}

TEST_CASE("stats: exact combinatorics") {
  // 52 choose 5 = 2598960.
  CHECK(stats::log_choose(52, 5) ==
        doctest::Approx(std::log(2598960.0)).epsilon(1e-12));
  // P[X >= 2], X ~ Bin(3, 1/2) = 4/8.
  CHECK(stats::binomial_tail(3, 2, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  // Complementarity.
  CHECK(stats::binomial_cdf(10, 4, 0.3) + stats::binomial_tail(10, 5, 0.3) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stats: log-space binomial tail reaches extreme exponents") {
  // P[X = n] for k = n is p^n exactly, far below double underflow in
  // linear space for n = 1000, p = 0.75.
  CHECK(stats::log_binomial_tail(1000, 1000, 0.75) ==
        doctest::Approx(1000.0 * std::log(0.75)).epsilon(1e-12));
  // log10 of that is about -124.9.
  CHECK(stats::log_binomial_tail(1000, 1000, 0.75) / std::log(10.0) ==
        doctest::Approx(-124.938736).epsilon(1e-6));
}

TEST_CASE("stats: Clopper-Pearson upper bound") {
  // Zero successes: upper = 1 - alpha^(1/n) ("rule of three" family).
  const double u = stats::clopper_pearson_upper(0, 1000, 0.05);
  CHECK(u == doctest::Approx(1.0 - std::pow(0.05, 1.0 / 1000)).epsilon(1e-9));
  // Monotone in successes.
  CHECK(stats::clopper_pearson_upper(5, 1000, 0.05) >
        stats::clopper_pearson_upper(1, 1000, 0.05));
  // All successes: bound is 1.
  CHECK(stats::clopper_pearson_upper(10, 10, 0.05) == doctest::Approx(1.0));
}

TEST_CASE("stats: chi-square critical value") {
  CHECK(stats::chi_squared_critical(1, 0.05) ==
        doctest::Approx(3.8414588).epsilon(1e-6));
  CHECK(stats::chi_squared_critical(10, 0.01) ==
        doctest::Approx(23.209251).epsilon(1e-6));
}

TEST_CASE("stats: wilson interval brackets the point estimate") {
  const auto [lo, hi] = stats::wilson_interval(80, 100, 1.96);
  CHECK(lo < 0.8);
  CHECK(hi > 0.8);
  CHECK(lo == doctest::Approx(0.7112).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.8661).epsilon(1e-3));
}

TEST_CASE("stats: fit_slope recovers an exact line") {
  std::vector<double> x{1, 2, 3, 4}, y{2.5, 4.5, 6.5, 8.5};
  CHECK(stats::fit_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("bloch: conjugate-basis overlaps") {
  CHECK(overlap_pure(PureQubit::zero(), PureQubit::zero()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(overlap_pure(PureQubit::zero(), PureQubit::one()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(overlap_pure(PureQubit::zero(), PureQubit::plus()) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(overlap_pure(PureQubit::plus(), PureQubit::minus()) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bloch: eigenstate measurement is exact, not merely probable") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    BlochQubit q(PureQubit::plus());
    CHECK(q.measure_along(Eigen::Vector3d::UnitX(), rng) == 1);
  }
}

TEST_CASE("bloch: measurement statistics match prob_along") {
  Rng rng(11);
  const PureQubit state(std::numbers::pi / 3.0, 0.4);
  const Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  const double p = BlochQubit(state).prob_along(axis);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    BlochQubit q(state);
    ones += q.measure_along(axis, rng);
  }
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(double(ones) / n - p) < 4 * se);
}

TEST_CASE("bloch: measurement collapses to the outcome eigenstate") {
  Rng rng(4);
  BlochQubit q(PureQubit::haar_random(rng));
  const Eigen::Vector3d axis(0.0, 1.0, 0.0);
  const int out = q.measure_along(axis, rng);
  const Eigen::Vector3d expect = out == 1 ? axis : Eigen::Vector3d(-axis);
  CHECK((q.r - expect).norm() < 1e-12);
  // Remeasuring along the same axis repeats the outcome.
  CHECK(q.measure_along(axis, rng) == out);
}

TEST_CASE("bloch: channels act affinely on the Bloch vector") {
  BlochQubit q(PureQubit::plus());
  q.apply(NoiseChannel::depolarizing(0.3));
  CHECK(q.r.x() == doctest::Approx(0.7).epsilon(1e-12));

  BlochQubit z(PureQubit::zero());
  z.apply(NoiseChannel::depolarizing(0.3));
  CHECK(z.r.z() == doctest::Approx(0.7).epsilon(1e-12));

  BlochQubit d(PureQubit::plus());
  d.apply(NoiseChannel::dephasing(0.25));
  CHECK(d.r.x() == doctest::Approx(0.75).epsilon(1e-12));

  BlochQubit e(PureQubit::one());
  e.apply(NoiseChannel::amplitude_damping(0.4));
  // |1> has z = -1; damping moves it toward |0>: z -> -(1 - gamma) + gamma.
  CHECK(e.r.z() == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("density matrix: validation rejects junk") {
  Eigen::MatrixXcd bad(2, 2);
  bad << 1.0, 0.5, 0.4, 0.0;  // not Hermitian
  CHECK_THROWS(DensityMatrix(bad));
  Eigen::MatrixXcd scaled = Eigen::MatrixXcd::Identity(2, 2);  // trace 2
  CHECK_THROWS(DensityMatrix(scaled));
}

TEST_CASE("density matrix: fidelity equals overlap on pure states") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const PureQubit a = PureQubit::haar_random(rng);
    const PureQubit b = PureQubit::haar_random(rng);
    const double f = fidelity_dm(DensityMatrix::from_pure_qubit(a),
                                 DensityMatrix::from_pure_qubit(b));
    CHECK(f == doctest::Approx(overlap_pure(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("density matrix: fidelity symmetry and mixed-state value") {
  Rng rng(22);
  const auto mixed = DensityMatrix::maximally_mixed(2);
  const auto pure = DensityMatrix::from_pure_qubit(PureQubit::haar_random(rng));
  // F(|psi>, I/d) = <psi| I/d |psi> = 1/d.
  CHECK(fidelity_dm(pure, mixed) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fidelity_dm(mixed, pure) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fidelity_dm(mixed, mixed) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("density matrix: channel actions") {
  const auto plus = DensityMatrix::from_pure_qubit(PureQubit::plus());
  const auto dep = apply_channel(plus, NoiseChannel::depolarizing(1.0));
  CHECK((dep.entries() - Eigen::MatrixXcd::Identity(2, 2) / 2.0).norm() < 1e-12);
  const auto deph = apply_channel(plus, NoiseChannel::dephasing(0.5));
  CHECK(deph.entries()(0, 1).real() == doctest::Approx(0.25).epsilon(1e-12));
  // Erasure in d = 4 mixes toward I/4.
  const auto big = DensityMatrix::maximally_mixed(4);
  const auto er = apply_channel(big, NoiseChannel::erasure(0.3));
  CHECK((er.entries() - big.entries()).norm() < 1e-12);
}

TEST_CASE("gaussian: vacuum and squeezing bookkeeping") {
  const auto vac = GaussianState::vacuum();
  CHECK(vac.mean_photon_number() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(squeezing_level_db(0.25) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(squeezing_level_db(0.125) == doctest::Approx(3.0102999566).epsilon(1e-8));

  const auto sq = squeeze(vac, 0.5, 0.0);
  CHECK(sq.cov(0, 0) == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(sq.cov(1, 1) == doctest::Approx(0.25 * std::exp(1.0)).epsilon(1e-12));
  CHECK(sq.min_variance() == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
  // sinh^2(r) photons in a squeezed vacuum.
  CHECK(sq.mean_photon_number() ==
        doctest::Approx(std::sinh(0.5) * std::sinh(0.5)).epsilon(1e-12));
}

TEST_CASE("gaussian: closed-form fidelity against known values") {
  const auto vac = GaussianState::vacuum();
  // Coherent states: F = exp(-|alpha - beta|^2); offset (1, 0) -> e^-1.
  const auto coh = displace(vac, 1.0, 0.0);
  CHECK(fidelity_gaussian(vac, coh) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // Vacuum vs squeezed vacuum: F = sech(r).
  for (double r : {0.2, 0.5, 1.0}) {
    const auto sq = squeeze(vac, r, 0.7);
    CHECK(fidelity_gaussian(vac, sq) ==
          doctest::Approx(1.0 / std::cosh(r)).epsilon(1e-10));
  }
  // Symmetry and normalization.
  const auto a = displace(squeeze(vac, 0.3, 0.2), 0.4, -0.1);
  const auto b = displace(squeeze(vac, 0.6, -0.5), -0.2, 0.3);
  CHECK(fidelity_gaussian(a, b) == doctest::Approx(fidelity_gaussian(b, a)).epsilon(1e-12));
  CHECK(fidelity_gaussian(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian: heterodyne sampling has the advertised covariance") {
  Rng rng(31);
  const auto sq = squeeze(GaussianState::vacuum(), 0.4, 0.0);
  const int n = 200000;
  double sx = 0, sxx = 0, sp = 0, spp = 0;
  for (int i = 0; i < n; ++i) {
    const auto v = heterodyne_draw(sq, 0.25, rng);
    sx += v[0];
    sxx += v[0] * v[0];
    sp += v[1];
    spp += v[1] * v[1];
  }
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vp = spp / n - (sp / n) * (sp / n);
  CHECK(vx == doctest::Approx(sq.cov(0, 0) + 0.25).epsilon(0.03));
  CHECK(vp == doctest::Approx(sq.cov(1, 1) + 0.25).epsilon(0.03));
}

TEST_CASE("fock oracle: self-check passes on representative states") {
  // The oracle throws if its own moment reconstruction disagrees, so
  // constructing these is already the assertion.
  CHECK_NOTHROW(fock_oracle::gaussian_to_fock(GaussianState::vacuum()));
  CHECK_NOTHROW(fock_oracle::gaussian_to_fock(
      displace(GaussianState::vacuum(), 0.8, -0.5)));
  CHECK_NOTHROW(fock_oracle::gaussian_to_fock(
      squeeze(GaussianState::vacuum(), 0.5, 1.1)));
  // Mixed: thermal-like covariance.
  GaussianState th;
  th.cov *= 1.8;
  CHECK_NOTHROW(fock_oracle::gaussian_to_fock(th));
}

TEST_CASE("fock oracle: fidelity_gaussian agrees with Fock fidelity_dm") {
  Rng rng(77);
  for (int i = 0; i < 25; ++i) {
    auto mk = [&rng]() {
      GaussianState g = squeeze(GaussianState::vacuum(), rng.uniform(0.0, 0.4),
                                rng.uniform(0.0, 3.1));
      g = displace(g, rng.normal(0.0, 0.4), rng.normal(0.0, 0.4));
      if (rng.bernoulli(0.5)) {
        // add symmetric thermal noise, keeping the state physical
        g.cov += Eigen::Matrix2d::Identity() * rng.uniform(0.0, 0.2);
      }
      return g;
    };
    const GaussianState a = mk(), b = mk();
    const double f_cf = fidelity_gaussian(a, b);
    const double f_fock = fidelity_dm(fock_oracle::gaussian_to_fock(a),
                                      fock_oracle::gaussian_to_fock(b));
    CHECK(f_cf == doctest::Approx(f_fock).epsilon(1e-6));
  }
}
