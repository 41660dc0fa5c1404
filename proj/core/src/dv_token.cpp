#include "qtoken/dv_token.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qtoken/stats.hpp"

namespace qtoken::dv {

namespace {

constexpr double kPi = std::numbers::pi;

std::string random_serial(Rng& rng) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(32);
  for (int word = 0; word < 2; ++word) {
    std::uint64_t v = rng.next_u64();
    for (int i = 0; i < 16; ++i) {
      s.push_back(hex[v & 0xF]);
      v >>= 4;
    }
  }
  return s;
}

Eigen::Vector3d breidbart_axis() {
  // Halfway between +Z and +X on the Bloch sphere.
  return Eigen::Vector3d(std::sin(kPi / 4.0), 0.0, std::cos(kPi / 4.0));
}

}  // namespace

PureQubit Record::state() const {
  if (basis == Basis::Z) return bit == 0 ? PureQubit::zero() : PureQubit::one();
  return bit == 0 ? PureQubit::plus() : PureQubit::minus();
}

Eigen::Vector3d Record::axis() const {
  return basis == Basis::Z ? Eigen::Vector3d(0, 0, 1) : Eigen::Vector3d(1, 0, 0);
}

nlohmann::json TokenSecret::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records)
    recs.push_back({{"basis", r.basis == Basis::Z ? "Z" : "X"}, {"bit", r.bit}});
  return {{"serial", serial}, {"records", recs}};
}

TokenSecret TokenSecret::from_json(const nlohmann::json& j) {
  TokenSecret s;
  s.serial = j.at("serial").get<std::string>();
  for (const auto& r : j.at("records")) {
    Record rec;
    rec.basis = r.at("basis").get<std::string>() == "Z" ? Basis::Z : Basis::X;
    rec.bit = r.at("bit").get<int>();
    s.records.push_back(rec);
  }
  return s;
}

nlohmann::json Token::to_json() const {
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& q : qubits) {
    if (q.erased) {
      qs.push_back({{"erased", true}});
    } else {
      qs.push_back({{"bloch", {q.state.r.x(), q.state.r.y(), q.state.r.z()}}});
    }
  }
  return {{"serial", serial}, {"qubits", qs}};
}

Token Token::from_json(const nlohmann::json& j) {
  Token t;
  t.serial = j.at("serial").get<std::string>();
  for (const auto& q : j.at("qubits")) {
    Qubit qb;
    if (q.value("erased", false)) {
      qb.erased = true;
    } else {
      const auto& b = q.at("bloch");
      qb.state.r = Eigen::Vector3d(b[0].get<double>(), b[1].get<double>(),
                                   b[2].get<double>());
    }
    t.qubits.push_back(qb);
  }
  return t;
}

std::pair<TokenSecret, Token> issue(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("issue: n must be >= 1");
  TokenSecret secret;
  secret.serial = random_serial(rng);
  Token token;
  token.serial = secret.serial;
  secret.records.reserve(n);
  token.qubits.reserve(n);
  for (int i = 0; i < n; ++i) {
    Record rec;
    const auto pick = rng.uniform_int(4);
    rec.basis = pick < 2 ? Basis::Z : Basis::X;
    rec.bit = static_cast<int>(pick % 2);
    secret.records.push_back(rec);
    token.qubits.push_back({BlochQubit(rec.state()), false});
  }
  return {std::move(secret), std::move(token)};
}

VerifyResult verify(Token& token, const TokenSecret& secret,
                    const VerificationPolicy& policy, Rng& rng) {
  if (token.serial != secret.serial)
    throw std::invalid_argument("verify: serial mismatch, wrong token presented");
  if (token.qubits.size() != secret.records.size())
    throw std::invalid_argument("verify: token/secret length mismatch");
  const int n = static_cast<int>(secret.records.size());
  const int k = policy.min_matches > 0 ? policy.min_matches : n;

  VerifyResult res;
  for (int i = 0; i < n; ++i) {
    auto& q = token.qubits[i];
    if (q.erased) continue;
    ++res.answered;
    // Measurement outcome 1 corresponds to the -axis eigenstate (bit 1).
    const Eigen::Vector3d axis = -secret.records[i].axis();
    const int outcome = q.state.measure_along(axis, rng);
    if (outcome == (secret.records[i].bit == 1 ? 1 : 0)) ++res.matches;
  }
  if (policy.lenient) {
    res.accept = res.answered >= policy.min_answered && res.matches >= std::min(k, res.answered);
  } else {
    res.accept = res.matches >= k;
  }
  return res;
}

MeasureStrategy measure_strategy_from_string(const std::string& s) {
  if (s == "all-Z") return MeasureStrategy::all_z;
  if (s == "all-X") return MeasureStrategy::all_x;
  if (s == "random") return MeasureStrategy::random_basis;
  if (s == "breidbart") return MeasureStrategy::breidbart;
  throw std::invalid_argument("unknown measure-resend strategy: " + s);
}

std::string to_string(MeasureStrategy s) {
  switch (s) {
    case MeasureStrategy::all_z: return "all-Z";
    case MeasureStrategy::all_x: return "all-X";
    case MeasureStrategy::random_basis: return "random";
    case MeasureStrategy::breidbart: return "breidbart";
  }
  return "random";
}

Token adversary_measure_resend(Token& token, MeasureStrategy strategy,
                               Rng& rng) {
  Token forged;
  forged.serial = token.serial;
  forged.qubits.reserve(token.qubits.size());
  for (auto& q : token.qubits) {
    if (q.erased) {
      forged.qubits.push_back({BlochQubit(), true});
      continue;
    }
    Eigen::Vector3d axis(0, 0, 1);
    switch (strategy) {
      case MeasureStrategy::all_z: axis = Eigen::Vector3d(0, 0, 1); break;
      case MeasureStrategy::all_x: axis = Eigen::Vector3d(1, 0, 0); break;
      case MeasureStrategy::random_basis:
        axis = rng.bernoulli(0.5) ? Eigen::Vector3d(0, 0, 1)
                                  : Eigen::Vector3d(1, 0, 0);
        break;
      case MeasureStrategy::breidbart: axis = breidbart_axis(); break;
    }
    q.state.measure_along(axis, rng);  // collapses the original
    forged.qubits.push_back({q.state, false});
  }
  return forged;
}

namespace {

// Enumerate the 4 issued states x adversary bases x outcomes with exact
// probabilities. `pass` accumulates P[forged qubit passes verification],
// `guess` accumulates P[adversary's outcome decodes to the issued bit].
void enumerate_strategy(MeasureStrategy strategy, double& pass, double& guess) {
  const std::array<Record, 4> states = {Record{Basis::Z, 0}, Record{Basis::Z, 1},
                                        Record{Basis::X, 0}, Record{Basis::X, 1}};
  std::vector<std::pair<Eigen::Vector3d, double>> bases;  // axis, weight
  switch (strategy) {
    case MeasureStrategy::all_z: bases = {{{0, 0, 1}, 1.0}}; break;
    case MeasureStrategy::all_x: bases = {{{1, 0, 0}, 1.0}}; break;
    case MeasureStrategy::random_basis:
      bases = {{{0, 0, 1}, 0.5}, {{1, 0, 0}, 0.5}};
      break;
    case MeasureStrategy::breidbart: bases = {{breidbart_axis(), 1.0}}; break;
  }
  pass = 0.0;
  guess = 0.0;
  for (const auto& rec : states) {
    const Eigen::Vector3d psi = rec.state().bloch();
    const Eigen::Vector3d verify_axis = rec.axis();  // +1 eigenstate = bit 0
    for (const auto& [axis, weight] : bases) {
      for (int outcome = 0; outcome < 2; ++outcome) {
        const Eigen::Vector3d eigen = outcome == 0 ? axis : Eigen::Vector3d(-axis);
        const double p_outcome = (1.0 + psi.dot(eigen)) / 2.0;
        // Resent eigenstate passes if the verifier's measurement returns
        // the issued bit.
        const Eigen::Vector3d pass_state =
            rec.bit == 0 ? verify_axis : Eigen::Vector3d(-verify_axis);
        const double p_pass = (1.0 + eigen.dot(pass_state)) / 2.0;
        pass += 0.25 * weight * p_outcome * p_pass;
        // Decode: outcome 0 = bit 0 along the adversary's axis.
        if (outcome == rec.bit) guess += 0.25 * weight * p_outcome;
      }
    }
  }
}

}  // namespace

double measure_resend_pass_probability(MeasureStrategy strategy) {
  double pass, guess;
  enumerate_strategy(strategy, pass, guess);
  return pass;
}

double measure_resend_guess_accuracy(MeasureStrategy strategy) {
  double pass, guess;
  enumerate_strategy(strategy, pass, guess);
  return guess;
}

double counterfeit_pass_probability(int n, double per_qubit_p, int k) {
  if (per_qubit_p < 0.0 || per_qubit_p > 1.0)
    throw std::invalid_argument("counterfeit_pass_probability: p not in [0,1]");
  if (k >= n) return std::exp(n * std::log(std::max(per_qubit_p, 0.0)));
  return stats::binomial_tail(n, k, per_qubit_p);
}

double RoundtripStats::accept_rate() const {
  return trials > 0 ? static_cast<double>(accepted) / trials : 0.0;
}

RoundtripStats roundtrip(int n, const MemorySpec& memory, double hold_s,
                         const VerificationPolicy& policy, int trials,
                         Rng& rng) {
  if (memory.modes < n)
    throw std::invalid_argument("roundtrip: memory capacity exceeded");
  RoundtripStats stats;
  stats.trials = trials;
  stats.match_histogram.assign(n + 1, 0);
  for (int t = 0; t < trials; ++t) {
    auto [secret, token] = issue(n, rng);
    Memory mem(memory);
    std::vector<bool> heralded(n, false);
    for (int i = 0; i < n; ++i) {
      heralded[i] = mem.write(i, token.qubits[i].state, 0.0, rng);
      if (!heralded[i]) ++stats.herald_failures;
    }
    for (int i = 0; i < n; ++i) {
      if (!heralded[i]) {
        token.qubits[i].erased = true;
        continue;
      }
      auto got = mem.read(i, hold_s, rng);
      if (got.state) {
        token.qubits[i].state = *got.state;
      } else {
        token.qubits[i].erased = true;
        ++stats.erasures;
      }
    }
    const auto res = verify(token, secret, policy, rng);
    if (res.accept) ++stats.accepted;
    ++stats.match_histogram[res.matches];
  }
  return stats;
}

}  // namespace qtoken::dv
