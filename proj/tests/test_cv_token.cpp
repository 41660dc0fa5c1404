#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "qtoken/cv_token.hpp"

using namespace qtoken;
using namespace qtoken::cv;

TEST_CASE("codebook: validation and JSON round trip, including infinity") {
  Rng rng(1);
  const auto cb = Codebook::random(6, 1.5, 0.3, 0.2, rng);
  CHECK(cb.symbols.size() == 6);
  CHECK(Codebook::from_json(cb.to_json()).to_json() == cb.to_json());

  Codebook inf_cb({{0.0, 0.0}}, 0.2, 0.0,
                  std::numeric_limits<double>::infinity());
  const auto j = inf_cb.to_json();
  CHECK(j.at("codebook_variance") == "infinite");
  CHECK(std::isinf(Codebook::from_json(j).codebook_variance));

  CHECK_THROWS(Codebook({{0.0, 0.0}}, -0.1, 0.0, 1.0));
}

TEST_CASE("generate_token: squeezed then displaced") {
  Rng rng(2);
  Codebook cb({{1.0, -0.5}}, 0.3466, 0.0, 1.0);
  const auto g = generate_token(cb, 0, rng);
  CHECK(g.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.mean[1] == doctest::Approx(-0.5).epsilon(1e-12));
  // 0.3466 nepers ~ 3.01 dB of squeezing.
  CHECK(squeezing_level_db(g.min_variance()) ==
        doctest::Approx(3.0105).epsilon(1e-3));
  CHECK_THROWS(generate_token(cb, 1, rng));
}

TEST_CASE("spin memory params: passivity enforced") {
  CHECK_NOTHROW(SpinMemoryParams(1.0, 0.0, 0.0, 0.25, 0.25));
  const double s = std::sqrt(1.0 - 0.36) / std::sqrt(2.0);
  CHECK_NOTHROW(SpinMemoryParams(0.6, s, s, 0.25, 0.25));
  CHECK_THROWS(SpinMemoryParams(0.9, 0.9, 0.0, 0.25, 0.25));  // not normalized
  CHECK_THROWS(SpinMemoryParams(1.0, 0.0, 0.0, 0.1, 0.25));   // sub-vacuum bath
}

TEST_CASE("spin memory channel: identity at r = 1 and the variance law") {
  const auto in = displace(squeeze(GaussianState::vacuum(), 0.4, 0.0), 0.7, 0.2);

  const auto id = spin_memory_channel(in, SpinMemoryParams(1, 0, 0, 0.25, 0.25));
  CHECK((id.cov - in.cov).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((id.mean - in.mean).cwiseAbs().maxCoeff() < 1e-15);

  const double l = std::sqrt(1.0 - 0.36) / std::sqrt(2.0);
  const SpinMemoryParams p(0.6, l, l, 0.30, 0.50);
  const auto out = spin_memory_channel(in, p);
  const double added = l * l * 0.30 + l * l * 0.50;
  CHECK(out.cov(0, 0) ==
        doctest::Approx(0.36 * in.cov(0, 0) + added).epsilon(1e-12));
  CHECK(out.cov(1, 1) ==
        doctest::Approx(0.36 * in.cov(1, 1) + added).epsilon(1e-12));
  CHECK(out.mean[0] == doctest::Approx(0.6 * in.mean[0]).epsilon(1e-12));
  // Degraded: input squeezing partially washed out but output stays physical.
  CHECK(out.min_variance() > in.min_variance());
  CHECK(out.cov.determinant() >= 1.0 / 16.0 - 1e-12);
}

TEST_CASE("reconstruct_gaussian: recovers the true moments") {
  Rng rng(3);
  const auto truth = displace(squeeze(GaussianState::vacuum(), 0.3, 0.5), 0.8, -0.4);
  const auto samples = heterodyne_sample(truth, 200000, 0.25, rng);
  const auto est = reconstruct_gaussian(samples, 0.25);
  CHECK((est.mean - truth.mean).cwiseAbs().maxCoeff() < 0.01);
  CHECK((est.cov - truth.cov).cwiseAbs().maxCoeff() < 0.01);
  // Gaussian data: excess kurtosis near zero.
  CHECK(std::abs(est.excess_kurtosis[0]) < 0.1);
  CHECK(std::abs(est.excess_kurtosis[1]) < 0.1);
}

TEST_CASE("reconstruct_gaussian: guards against bad inputs") {
  Rng rng(4);
  const auto samples = heterodyne_sample(GaussianState::vacuum(), 50, 0.25, rng);
  CHECK_THROWS(reconstruct_gaussian(samples, 0.25));  // too few
  const auto enough = heterodyne_sample(GaussianState::vacuum(), 5000, 0.25, rng);
  // Grossly overstated added noise drives the estimate unphysical.
  CHECK_THROWS(reconstruct_gaussian(enough, 0.49));
}

TEST_CASE("no-cloning threshold: infinite codebook is exactly 2/3") {
  Codebook inf_cb({{0.0, 0.0}}, 0.0, 0.0,
                  std::numeric_limits<double>::infinity());
  CHECK(no_cloning_threshold(inf_cb) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(verify_no_cloning(0.67, inf_cb) == Verdict::authentic);
  CHECK(verify_no_cloning(0.66, inf_cb) == Verdict::suspect);
  // Boundary goes to suspect.
  CHECK(verify_no_cloning(2.0 / 3.0, inf_cb) == Verdict::suspect);
  CHECK_THROWS(verify_no_cloning(1.5, inf_cb));
}

TEST_CASE("no-cloning threshold: finite codebooks are stricter") {
  Codebook small({{0.0, 0.0}}, 0.0, 0.0, 0.25);
  Codebook large({{0.0, 0.0}}, 0.0, 0.0, 100.0);
  CHECK(no_cloning_threshold(small) > no_cloning_threshold(large));
  CHECK(no_cloning_threshold(large) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  // beta = 0.1, v = 0.25: threshold = 2/3 + 0.1 * 0.5 = 0.71666...
  CHECK(no_cloning_threshold(small, 0.1) ==
        doctest::Approx(2.0 / 3.0 + 0.05).epsilon(1e-12));
}

TEST_CASE("roundtrip: lossless channel certifies every symbol") {
  Rng rng(5);
  const auto cb = Codebook::random(4, 1.0, 0.3466, 0.0, rng);
  const SpinMemoryParams lossless(1.0, 0.0, 0.0, 0.25, 0.25);
  const auto reports = roundtrip(cb, lossless, 50000, 0.25, rng);
  REQUIRE(reports.size() == 4);
  for (const auto& rep : reports) {
    CHECK(rep.verdict == Verdict::authentic);
    CHECK(rep.fidelity > 0.99);
    CHECK(rep.squeezing_in_db == doctest::Approx(3.0105).epsilon(1e-3));
    CHECK(rep.squeezing_out_db ==
          doctest::Approx(rep.squeezing_in_db).epsilon(1e-9));
  }
}

TEST_CASE("roundtrip: squeezing degrades through a lossy spin memory") {
  Rng rng(6);
  const auto cb = Codebook::random(2, 0.5, 0.3466, 0.0, rng);
  const double l = std::sqrt(1.0 - 0.36) / std::sqrt(2.0);
  const SpinMemoryParams lossy(0.6, l, l, 0.25, 0.25);
  const auto reports = roundtrip(cb, lossy, 50000, 0.25, rng);
  for (const auto& rep : reports) {
    CHECK(rep.squeezing_out_db < rep.squeezing_in_db);
    CHECK(rep.squeezing_out_db > 0.0);  // some squeezing survives at t = 0.6
    CHECK(rep.fidelity < 1.0);
  }
}
