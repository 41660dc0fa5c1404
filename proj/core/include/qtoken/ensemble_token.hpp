#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtoken/bloch.hpp"
#include "qtoken/memory.hpp"
#include "qtoken/rng.hpp"

namespace qtoken::ensemble {

/// Issuer-side secret: one Bloch direction per token.
struct Secret {
  std::vector<PureQubit> angles;  // (theta_b^i, phi_b^i), i = 1..M
};

/// A token is an ensemble of N identically prepared spins; a coin holds M
/// tokens. Spins degrade to mixed Bloch vectors under noise and collapse
/// under measurement.
struct Coin {
  std::vector<std::vector<BlochQubit>> tokens;

  int tokens_per_coin() const { return static_cast<int>(tokens.size()); }
  int spins_per_token() const {
    return tokens.empty() ? 0 : static_cast<int>(tokens.front().size());
  }
};

struct CoinPolicy {
  int spins_per_token = 1;    // N
  int tokens_per_coin = 1;    // M
  double match_fraction = 1;  // tau
  int min_passing_tokens = 1; // T

  CoinPolicy() = default;
  CoinPolicy(int n, int m, double tau, int t);

  /// Smallest count satisfying k >= tau * N.
  int match_threshold() const;

  nlohmann::json to_json() const;
  static CoinPolicy from_json(const nlohmann::json& j);
};

std::pair<Secret, Coin> issue_coin(const CoinPolicy& policy, Rng& rng);

/// Measures every spin of the token along `axis` and counts observed +1
/// outcomes through the readout model. Spins collapse in place.
int measure_token_counts(std::vector<BlochQubit>& token, const PureQubit& axis,
                         const ReadoutModel& readout, Rng& rng);

struct CoinVerifyResult {
  bool accept = false;
  int passing_tokens = 0;
  std::vector<int> counts;
};

/// Token i passes iff its count >= ceil(tau*N); the coin is accepted iff
/// at least T tokens pass. Consumes the coin (all spins collapse).
CoinVerifyResult verify_coin(Coin& coin, const Secret& secret,
                             const CoinPolicy& policy,
                             const ReadoutModel& readout, Rng& rng);

enum class AttackKind { single_axis, two_axis, three_axis, per_spin_split };
AttackKind attack_kind_from_string(const std::string& s);
std::string to_string(AttackKind k);

/// Measure-estimate-reprepare adversary: measures each token's spins
/// (split across axes per the attack kind), forms a maximum-likelihood
/// Bloch-direction estimate from the counts, and prepares a fresh N-spin
/// ensemble at the estimate. The original coin is consumed.
Coin attack_estimate_reprepare(Coin& coin, AttackKind kind, Rng& rng);

/// The adversary's direction estimate for a single token (exposed for the
/// projection-noise scaling analysis).
Eigen::Vector3d estimate_token_direction(std::vector<BlochQubit>& token,
                                         AttackKind kind, Rng& rng);

struct ErrorRates {
  double per_token_honest = 0.0;        // p_h, analytic
  double per_token_forged_mean = 0.0;   // Monte Carlo point estimate
  double per_token_forged_upper = 0.0;  // Clopper-Pearson upper bound
  double false_reject = 0.0;            // analytic from p_h
  double log10_false_accept = 0.0;      // analytic upper bound from p_f upper
  std::int64_t forged_samples = 0;
  std::uint64_t seed = 0;

  double false_accept() const;
  nlohmann::json to_json() const;
};

/// Honest per-token pass probability is exact (binomial tail of the
/// readout-composed Bernoulli); the forged one is Monte Carlo with a
/// Clopper-Pearson upper bound at confidence 1 - alpha. Coin-level rates
/// are exact log-space binomial tails over M tokens.
ErrorRates coin_error_rates(const CoinPolicy& policy,
                            const ReadoutModel& readout, AttackKind attack,
                            const NoiseChannel& honest_noise,
                            std::int64_t forged_samples, double alpha,
                            std::uint64_t seed, int threads = 1);

struct DesignTargets {
  double max_false_accept = 1e-22;
  double max_false_reject = 1e-3;
};

struct DesignBounds {
  std::vector<int> spins_per_token = {8, 12, 16, 20, 24, 32};
  int max_tokens_per_coin = 4000;
  std::vector<double> match_fractions = {0.60, 0.65, 0.70, 0.75, 0.80,
                                         0.85, 0.90, 0.95, 1.00};
};

struct DesignResult {
  bool feasible = false;
  CoinPolicy policy;
  ErrorRates certificate;
  // Best achieved (fa, fr) pair when infeasible.
  double best_false_accept = 1.0;
  double best_false_reject = 1.0;

  nlohmann::json to_json() const;
  std::string certificate_text() const;
};

/// Grid search over (N, tau, M, T) for the minimal-N*M policy meeting both
/// targets; the returned certificate is re-estimated at `certify_samples`
/// forged-token samples.
DesignResult design_coin(const DesignTargets& targets,
                         const ReadoutModel& readout, AttackKind attack,
                         const DesignBounds& bounds, std::uint64_t seed,
                         std::int64_t screen_samples = 20000,
                         std::int64_t certify_samples = 1000000,
                         int threads = 1);

/// Monte Carlo false-reject estimate for a policy (honest coins only);
/// spins simulated individually. Returns the rejected fraction.
double monte_carlo_false_reject(const CoinPolicy& policy,
                                const ReadoutModel& readout,
                                std::int64_t coins, std::uint64_t seed,
                                int threads = 1);

}  // namespace qtoken::ensemble
