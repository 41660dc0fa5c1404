#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtoken/bloch.hpp"
#include "qtoken/memory.hpp"
#include "qtoken/rng.hpp"

namespace qtoken::dv {

enum class Basis { Z, X };

struct Record {
  Basis basis = Basis::Z;
  int bit = 0;

  /// Eigenstate this record describes: Z/0 -> |0>, Z/1 -> |1>,
  /// X/0 -> |+>, X/1 -> |->.
  PureQubit state() const;
  Eigen::Vector3d axis() const;  // measurement axis (+1 eigenstate = bit 0)
};

/// Issuer-side classical description of a token.
struct TokenSecret {
  std::string serial;  // 128-bit random identifier, hex
  std::vector<Record> records;

  nlohmann::json to_json() const;
  static TokenSecret from_json(const nlohmann::json& j);
};

/// Holder-side qubit collection, slot order = TDM order. Qubits may be
/// degraded to mixed states by storage or marked erased by heralded loss.
struct Token {
  struct Qubit {
    BlochQubit state;
    bool erased = false;
  };

  std::string serial;
  std::vector<Qubit> qubits;

  nlohmann::json to_json() const;
  static Token from_json(const nlohmann::json& j);
};

/// Accept rule. Strict policy counts erased qubits as mismatches; the
/// lenient flag excludes them instead, subject to a minimum number of
/// answered qubits.
struct VerificationPolicy {
  int min_matches = 0;  // k; 0 means "all n" resolved at verify time
  bool lenient = false;
  int min_answered = 0;
};

struct VerifyResult {
  bool accept = false;
  int matches = 0;
  int answered = 0;
};

std::pair<TokenSecret, Token> issue(int n, Rng& rng);

/// Measures each qubit in its recorded basis and compares with the
/// recorded bit; consumes the token states. Throws on serial mismatch.
VerifyResult verify(Token& token, const TokenSecret& secret,
                    const VerificationPolicy& policy, Rng& rng);

enum class MeasureStrategy { all_z, all_x, random_basis, breidbart };
MeasureStrategy measure_strategy_from_string(const std::string& s);
std::string to_string(MeasureStrategy s);

/// Intercept-resend: measures every qubit per the strategy and re-prepares
/// the outcome eigenstate. The original token is consumed (collapsed).
Token adversary_measure_resend(Token& token, MeasureStrategy strategy,
                               Rng& rng);

/// Exact per-qubit pass probability of a measure-resend strategy against
/// uniform issuance, by enumeration over the 4 states x outcomes.
double measure_resend_pass_probability(MeasureStrategy strategy);

/// Exact probability the adversary's recorded guess equals the issued bit.
double measure_resend_guess_accuracy(MeasureStrategy strategy);

/// Acceptance probability when every qubit independently matches with
/// probability p: p^n for k = n, otherwise the binomial upper tail,
/// evaluated in log space.
double counterfeit_pass_probability(int n, double per_qubit_p, int k);

struct RoundtripStats {
  int trials = 0;
  int accepted = 0;
  int herald_failures = 0;
  int erasures = 0;
  std::vector<int> match_histogram;  // index = matches
  double accept_rate() const;
};

/// issue -> write (heralds) -> hold -> read -> verify, repeated `trials`
/// times against a fresh memory each trial.
RoundtripStats roundtrip(int n, const MemorySpec& memory, double hold_s,
                         const VerificationPolicy& policy, int trials,
                         Rng& rng);

}  // namespace qtoken::dv
