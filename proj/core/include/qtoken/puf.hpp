#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qtoken/channel.hpp"
#include "qtoken/rng.hpp"

namespace qtoken::puf {

/// Simulated quantum-readout PUF: a hidden Haar-random unitary drawn from
/// a device seed, optionally noisy per evaluation. The device seed and the
/// unitary never appear in serialized transcripts.
class SimulatedQPUF {
 public:
  SimulatedQPUF(int dim, std::uint64_t device_seed,
                std::optional<NoiseChannel> noise = std::nullopt);

  int dim() const { return dim_; }
  const std::optional<NoiseChannel>& noise() const { return noise_; }

  /// Ideal (noiseless) response to a challenge.
  Eigen::VectorXcd ideal_response(const Eigen::VectorXcd& challenge) const;

  /// Per-evaluation response; the configured noise channel shows up as a
  /// reduced projective-test pass probability downstream.
  Eigen::VectorXcd respond(const Eigen::VectorXcd& challenge, Rng& rng) const;

  /// Probability that the noisy response passes a projective test onto the
  /// ideal response (1 for a noiseless device).
  double pass_probability(const Eigen::VectorXcd& challenge,
                          const Eigen::VectorXcd& expected) const;

 private:
  int dim_;
  std::optional<NoiseChannel> noise_;
  Eigen::MatrixXcd unitary_;
};

Eigen::VectorXcd haar_random_state(int dim, Rng& rng);
Eigen::MatrixXcd haar_random_unitary(int dim, std::uint64_t seed);

struct CRPEntry {
  int challenge_id = 0;
  Eigen::VectorXcd challenge;
  Eigen::VectorXcd expected_response;
  bool retired = false;
};

/// Classical enrollment table. Copyable by construction; that is the
/// point of the trusted-enrollment threat model.
struct CRPTable {
  int dim = 2;
  std::vector<CRPEntry> entries;

  int active_count() const;
  nlohmann::json to_json() const;
  static CRPTable from_json(const nlohmann::json& j);
};

CRPTable enroll(const SimulatedQPUF& puf, int n_crp, Rng& rng);

struct AuthPolicy {
  int challenges_per_session = 1;  // k
  int accept_min = 1;

  AuthPolicy() = default;
  AuthPolicy(int k, int accept_min);
};

/// Anything that can answer challenges: the genuine device or an
/// adversary.
class Responder {
 public:
  virtual ~Responder() = default;
  /// Probability the response passes the projective test onto `expected`.
  virtual double respond_pass_probability(const Eigen::VectorXcd& challenge,
                                          const Eigen::VectorXcd& expected,
                                          Rng& rng) = 0;
};

class GenuineDevice final : public Responder {
 public:
  explicit GenuineDevice(const SimulatedQPUF& puf) : puf_(&puf) {}
  double respond_pass_probability(const Eigen::VectorXcd& challenge,
                                  const Eigen::VectorXcd& expected,
                                  Rng& rng) override;

 private:
  const SimulatedQPUF* puf_;
};

/// Impersonator with no device access answering every challenge with one
/// fixed state.
class FixedStateImpersonator final : public Responder {
 public:
  explicit FixedStateImpersonator(Eigen::VectorXcd state);
  double respond_pass_probability(const Eigen::VectorXcd& challenge,
                                  const Eigen::VectorXcd& expected,
                                  Rng& rng) override;

 private:
  Eigen::VectorXcd state_;
};

enum class EmulationStrategy { nearest_observed, mixture, random };
EmulationStrategy emulation_strategy_from_string(const std::string& s);
std::string to_string(EmulationStrategy s);

/// Response guess for a new challenge given m observed CRPs.
Eigen::VectorXcd adversary_emulate(const std::vector<CRPEntry>& observed,
                                   const Eigen::VectorXcd& challenge,
                                   EmulationStrategy strategy, Rng& rng);

class EmulatorAdversary final : public Responder {
 public:
  EmulatorAdversary(std::vector<CRPEntry> observed, EmulationStrategy strategy);
  double respond_pass_probability(const Eigen::VectorXcd& challenge,
                                  const Eigen::VectorXcd& expected,
                                  Rng& rng) override;

 private:
  std::vector<CRPEntry> observed_;
  EmulationStrategy strategy_;
};

struct AuthResult {
  bool accept = false;
  int passed = 0;
  nlohmann::json transcript;  // challenge ids and pass bits only
};

/// Samples k challenges without replacement, runs each through the
/// responder and a projective test, and retires the used entries.
AuthResult authenticate(Responder& device_under_test, CRPTable& table,
                        const AuthPolicy& policy, Rng& rng);

}  // namespace qtoken::puf
