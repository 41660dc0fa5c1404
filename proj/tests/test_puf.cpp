#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "qtoken/puf.hpp"

using namespace qtoken;
using namespace qtoken::puf;

namespace {

/// Recursively collect every object key in a JSON document.
void collect_keys(const nlohmann::json& j, std::vector<std::string>& keys) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      keys.push_back(k);
      collect_keys(v, keys);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) collect_keys(v, keys);
  }
}

}  // namespace

TEST_CASE("haar unitary: unitary, seed-deterministic, seed-sensitive") {
  const auto u1 = haar_random_unitary(8, 123);
  const auto u2 = haar_random_unitary(8, 123);
  const auto u3 = haar_random_unitary(8, 124);
  CHECK((u1 - u2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u1 - u3).cwiseAbs().maxCoeff() > 1e-3);
  CHECK((u1 * u1.adjoint() - Eigen::MatrixXcd::Identity(8, 8))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("haar states: normalized, mean overlap 1/d") {
  Rng rng(1);
  for (int d : {2, 4, 8, 16}) {
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const auto a = haar_random_state(d, rng);
      const auto b = haar_random_state(d, rng);
      CHECK(std::abs(a.norm() - 1.0) < 1e-12);
      sum += std::norm(a.dot(b));
    }
    // E|<a|b>|^2 = 1/d; variance <= 1/d^2, so SE <= 1/(d sqrt(n)).
    CHECK(std::abs(sum / n - 1.0 / d) < 4.0 / (d * std::sqrt(double(n))));
  }
}

TEST_CASE("qpuf: dimension limits and determinism") {
  CHECK_THROWS(SimulatedQPUF(1, 0));
  CHECK_THROWS(SimulatedQPUF(65, 0));
  Rng rng(2);
  SimulatedQPUF a(4, 99), b(4, 99);
  const auto c = haar_random_state(4, rng);
  CHECK((a.ideal_response(c) - b.ideal_response(c)).norm() < 1e-15);
}

TEST_CASE("qpuf: noiseless pass probability is exactly 1 on the ideal pair") {
  Rng rng(3);
  SimulatedQPUF dev(8, 7);
  for (int i = 0; i < 100; ++i) {
    const auto c = haar_random_state(8, rng);
    CHECK(dev.pass_probability(c, dev.ideal_response(c)) == 1.0);
  }
}

TEST_CASE("qpuf: depolarizing noise lowers the pass probability") {
  Rng rng(4);
  SimulatedQPUF noisy(4, 7, NoiseChannel::depolarizing(0.2));
  const auto c = haar_random_state(4, rng);
  const double p = noisy.pass_probability(c, noisy.ideal_response(c));
  CHECK(p == doctest::Approx(0.8 + 0.2 / 4.0).epsilon(1e-12));
}

TEST_CASE("enroll: table round-trips through JSON") {
  Rng rng(5);
  SimulatedQPUF dev(4, 11);
  const auto table = enroll(dev, 10, rng);
  CHECK(table.active_count() == 10);
  const auto back = CRPTable::from_json(table.to_json());
  CHECK(back.to_json() == table.to_json());
}

TEST_CASE("authenticate: genuine noiseless device accepted with all passes") {
  Rng rng(6);
  SimulatedQPUF dev(8, 21);
  auto table = enroll(dev, 64, rng);
  GenuineDevice genuine(dev);
  const auto res = authenticate(genuine, table, AuthPolicy(16, 16), rng);
  CHECK(res.accept);
  CHECK(res.passed == 16);
  CHECK(table.active_count() == 48);  // used entries retired
}

TEST_CASE("authenticate: retirement makes challenges one-time") {
  Rng rng(7);
  SimulatedQPUF dev(2, 3);
  auto table = enroll(dev, 8, rng);
  GenuineDevice genuine(dev);
  authenticate(genuine, table, AuthPolicy(8, 1), rng);
  CHECK(table.active_count() == 0);
  CHECK_THROWS(authenticate(genuine, table, AuthPolicy(1, 1), rng));
}

TEST_CASE("fixed-state impersonator passes at rate ~1/d") {
  Rng rng(8);
  for (int d : {2, 4, 8}) {
    double sum = 0.0;
    const int n = 5000;
    SimulatedQPUF dev(d, 31);
    for (int i = 0; i < n; ++i) {
      FixedStateImpersonator imp(haar_random_state(d, rng));
      const auto c = haar_random_state(d, rng);
      sum += imp.respond_pass_probability(c, dev.ideal_response(c), rng);
    }
    CHECK(std::abs(sum / n - 1.0 / d) < 4.0 / (d * std::sqrt(double(n))));
  }
}

TEST_CASE("emulator: nearest-observed on a seen challenge is perfect") {
  Rng rng(9);
  SimulatedQPUF dev(4, 41);
  const auto table = enroll(dev, 8, rng);
  const auto guess =
      adversary_emulate(table.entries, table.entries[3].challenge,
                        EmulationStrategy::nearest_observed, rng);
  CHECK(std::norm(guess.dot(table.entries[3].expected_response)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("emulator: more observations help against fresh challenges") {
  Rng rng(10);
  SimulatedQPUF dev(2, 51);
  const auto big = enroll(dev, 256, rng);
  auto mean_pass = [&](int observed) {
    std::vector<CRPEntry> obs(big.entries.begin(),
                              big.entries.begin() + observed);
    double sum = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      const auto c = haar_random_state(2, rng);
      const auto guess =
          adversary_emulate(obs, c, EmulationStrategy::nearest_observed, rng);
      sum += std::norm(guess.dot(dev.ideal_response(c)));
    }
    return sum / n;
  };
  const double p0 = mean_pass(0);     // random guessing ~ 1/2
  const double p128 = mean_pass(128);
  CHECK(p0 == doctest::Approx(0.5).epsilon(0.1));
  CHECK(p128 > p0 + 0.1);
}

TEST_CASE("transcripts never leak the device or enrollment secrets") {
  Rng rng(11);
  SimulatedQPUF dev(8, 61);
  auto table = enroll(dev, 32, rng);
  GenuineDevice genuine(dev);
  const auto res = authenticate(genuine, table, AuthPolicy(8, 4), rng);
  std::vector<std::string> keys;
  collect_keys(res.transcript, keys);
  for (const auto& k : keys) {
    CHECK(k != "device_seed");
    CHECK(k != "unitary");
    CHECK(k != "hidden_unitary");
    CHECK(k != "challenge");
    CHECK(k != "expected_response");
  }
  // Positive check: round records carry only ids and pass bits.
  REQUIRE(res.transcript.contains("rounds"));
  for (const auto& round : res.transcript["rounds"]) {
    CHECK(round.size() == 2);
    CHECK(round.contains("challenge_id"));
    CHECK(round.contains("pass"));
  }
}
