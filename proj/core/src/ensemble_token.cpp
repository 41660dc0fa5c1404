#include "qtoken/ensemble_token.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <atomic>
#include <thread>

#include "qtoken/stats.hpp"

namespace qtoken::ensemble {

namespace {

/// Fixed chunk count independent of the worker count, so Monte Carlo
/// estimates do not depend on --threads. fn(chunk_index, begin, end).
constexpr int kMonteCarloChunks = 256;

template <typename Fn>
void parallel_chunks(std::int64_t total, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= kMonteCarloChunks) return;
      const std::int64_t begin = total * c / kMonteCarloChunks;
      const std::int64_t end = total * (c + 1) / kMonteCarloChunks;
      if (begin != end) fn(c, begin, end);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

CoinPolicy::CoinPolicy(int n, int m, double tau, int t)
    : spins_per_token(n),
      tokens_per_coin(m),
      match_fraction(tau),
      min_passing_tokens(t) {
  if (n < 1 || m < 1) throw std::invalid_argument("CoinPolicy: N, M must be >= 1");
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("CoinPolicy: tau must be in [0,1]");
  if (t < 1 || t > m)
    throw std::invalid_argument("CoinPolicy: T must be in [1, M]");
}

int CoinPolicy::match_threshold() const {
  return static_cast<int>(
      std::ceil(match_fraction * spins_per_token - 1e-9));
}

nlohmann::json CoinPolicy::to_json() const {
  return {{"N", spins_per_token},
          {"M", tokens_per_coin},
          {"tau", match_fraction},
          {"T", min_passing_tokens}};
}

CoinPolicy CoinPolicy::from_json(const nlohmann::json& j) {
  return CoinPolicy(j.at("N").get<int>(), j.at("M").get<int>(),
                    j.at("tau").get<double>(), j.at("T").get<int>());
}

std::pair<Secret, Coin> issue_coin(const CoinPolicy& policy, Rng& rng) {
  Secret secret;
  Coin coin;
  secret.angles.reserve(policy.tokens_per_coin);
  coin.tokens.reserve(policy.tokens_per_coin);
  for (int i = 0; i < policy.tokens_per_coin; ++i) {
    const PureQubit dir = PureQubit::haar_random(rng);
    secret.angles.push_back(dir);
    coin.tokens.emplace_back(policy.spins_per_token, BlochQubit(dir));
  }
  return {std::move(secret), std::move(coin)};
}

int measure_token_counts(std::vector<BlochQubit>& token, const PureQubit& axis,
                         const ReadoutModel& readout, Rng& rng) {
  const Eigen::Vector3d a = axis.bloch();
  int k = 0;
  for (auto& spin : token) {
    const int true_bit = spin.measure_along(a, rng);
    k += single_shot_readout(true_bit, readout, rng);
  }
  return k;
}

CoinVerifyResult verify_coin(Coin& coin, const Secret& secret,
                             const CoinPolicy& policy,
                             const ReadoutModel& readout, Rng& rng) {
  if (coin.tokens_per_coin() != static_cast<int>(secret.angles.size()) ||
      coin.tokens_per_coin() != policy.tokens_per_coin)
    throw std::invalid_argument("verify_coin: dimension mismatch");
  const int k_min = policy.match_threshold();
  CoinVerifyResult res;
  res.counts.reserve(coin.tokens_per_coin());
  for (int i = 0; i < coin.tokens_per_coin(); ++i) {
    const int k =
        measure_token_counts(coin.tokens[i], secret.angles[i], readout, rng);
    res.counts.push_back(k);
    if (k >= k_min) ++res.passing_tokens;
  }
  res.accept = res.passing_tokens >= policy.min_passing_tokens;
  return res;
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "single-axis") return AttackKind::single_axis;
  if (s == "two-axis") return AttackKind::two_axis;
  if (s == "three-axis") return AttackKind::three_axis;
  if (s == "per-spin-split") return AttackKind::per_spin_split;
  throw std::invalid_argument("unknown attack kind: " + s);
}

std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::single_axis: return "single-axis";
    case AttackKind::two_axis: return "two-axis";
    case AttackKind::three_axis: return "three-axis";
    case AttackKind::per_spin_split: return "per-spin-split";
  }
  return "three-axis";
}

Eigen::Vector3d estimate_token_direction(std::vector<BlochQubit>& token,
                                         AttackKind kind, Rng& rng) {
  const int n = static_cast<int>(token.size());
  const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
  Eigen::Vector3d est = Eigen::Vector3d::Zero();
  switch (kind) {
    case AttackKind::single_axis: {
      int k = 0;
      for (auto& s : token) k += s.measure_along(ez, rng);
      est = ez * (2.0 * k / n - 1.0);
      break;
    }
    case AttackKind::two_axis: {
      const int nz = n / 2;
      int kz = 0, kx = 0;
      for (int i = 0; i < nz; ++i) kz += token[i].measure_along(ez, rng);
      for (int i = nz; i < n; ++i) kx += token[i].measure_along(ex, rng);
      est = ez * (2.0 * kz / std::max(1, nz) - 1.0) +
            ex * (2.0 * kx / std::max(1, n - nz) - 1.0);
      break;
    }
    case AttackKind::three_axis: {
      const int nx = n / 3, ny = n / 3;
      const int nz = n - nx - ny;
      int kx = 0, ky = 0, kz = 0;
      int i = 0;
      for (int j = 0; j < nx; ++j) kx += token[i++].measure_along(ex, rng);
      for (int j = 0; j < ny; ++j) ky += token[i++].measure_along(ey, rng);
      for (int j = 0; j < nz; ++j) kz += token[i++].measure_along(ez, rng);
      est = ex * (2.0 * kx / std::max(1, nx) - 1.0) +
            ey * (2.0 * ky / std::max(1, ny) - 1.0) +
            ez * (2.0 * kz / std::max(1, nz) - 1.0);
      break;
    }
    case AttackKind::per_spin_split: {
      // Each spin measured along an independent random axis; outcomes are
      // accumulated as a weighted direction estimate.
      for (auto& s : token) {
        const Eigen::Vector3d axis = PureQubit::haar_random(rng).bloch();
        const int outcome = s.measure_along(axis, rng);
        est += axis * (outcome == 1 ? 1.0 : -1.0);
      }
      break;
    }
  }
  if (est.norm() < 1e-12) return PureQubit::haar_random(rng).bloch();
  return est.normalized();
}

Coin attack_estimate_reprepare(Coin& coin, AttackKind kind, Rng& rng) {
  Coin forged;
  forged.tokens.reserve(coin.tokens.size());
  for (auto& token : coin.tokens) {
    const int n = static_cast<int>(token.size());
    const Eigen::Vector3d est = estimate_token_direction(token, kind, rng);
    forged.tokens.emplace_back(n, BlochQubit(est));
  }
  return forged;
}

double ErrorRates::false_accept() const {
  return std::pow(10.0, log10_false_accept);
}

nlohmann::json ErrorRates::to_json() const {
  return {{"p_h", per_token_honest},
          {"p_f_mean", per_token_forged_mean},
          {"p_f_upper", per_token_forged_upper},
          {"false_reject", false_reject},
          {"log10_false_accept", log10_false_accept},
          {"forged_samples", forged_samples},
          {"seed", seed}};
}

namespace {

/// One forged-token pass/fail sample: random secret direction, adversary
/// estimate from a fresh honest token, forged token verified along the
/// secret with the readout model.
bool forged_token_passes(int n, int k_min, const ReadoutModel& readout,
                         AttackKind attack, Rng& rng) {
  const PureQubit secret = PureQubit::haar_random(rng);
  std::vector<BlochQubit> token(n, BlochQubit(secret));
  const Eigen::Vector3d est = estimate_token_direction(token, attack, rng);
  // Forged spins are pure along `est`; correct-outcome probability along
  // the secret axis is (1 + est.secret)/2 per spin, composed with readout.
  const double overlap = (1.0 + est.dot(secret.bloch())) / 2.0;
  int k = 0;
  for (int i = 0; i < n; ++i) {
    const int true_bit = rng.bernoulli(overlap) ? 1 : 0;
    k += single_shot_readout(true_bit, readout, rng);
  }
  return k >= k_min;
}

std::int64_t count_forged_passes(int n, int k_min, const ReadoutModel& readout,
                                 AttackKind attack, std::int64_t samples,
                                 std::uint64_t seed, int threads) {
  std::vector<std::int64_t> partial(kMonteCarloChunks, 0);
  parallel_chunks(samples, threads, [&](int chunk, std::int64_t b, std::int64_t e) {
    Rng rng = Rng::derive(seed, 0x666f7267ULL + chunk);
    std::int64_t hits = 0;
    for (std::int64_t i = b; i < e; ++i)
      if (forged_token_passes(n, k_min, readout, attack, rng)) ++hits;
    partial[chunk] = hits;
  });
  std::int64_t total = 0;
  for (auto h : partial) total += h;
  return total;
}

}  // namespace

ErrorRates coin_error_rates(const CoinPolicy& policy,
                            const ReadoutModel& readout, AttackKind attack,
                            const NoiseChannel& honest_noise,
                            std::int64_t forged_samples, double alpha,
                            std::uint64_t seed, int threads) {
  const int n = policy.spins_per_token;
  const int m = policy.tokens_per_coin;
  const int k_min = policy.match_threshold();
  ErrorRates out;
  out.seed = seed;
  out.forged_samples = forged_samples;

  // Honest path: each spin is measured along its own preparation axis, so
  // the pre-readout outcome is deterministic (+1) unless degraded by noise.
  BlochQubit honest_spin{Eigen::Vector3d(0, 0, 1)};
  honest_spin.apply(honest_noise);
  const double honest_true_one = (1.0 + honest_spin.r.z()) / 2.0;
  const double q_h = honest_true_one * readout.prob_observe_one(1) +
                     (1.0 - honest_true_one) * readout.prob_observe_one(0);
  out.per_token_honest = stats::binomial_tail(n, k_min, q_h);
  out.false_reject =
      stats::binomial_cdf(m, policy.min_passing_tokens - 1, out.per_token_honest);

  const std::int64_t hits =
      count_forged_passes(n, k_min, readout, attack, forged_samples, seed, threads);
  out.per_token_forged_mean =
      static_cast<double>(hits) / static_cast<double>(forged_samples);
  out.per_token_forged_upper =
      stats::clopper_pearson_upper(hits, forged_samples, alpha);
  out.log10_false_accept =
      stats::log_binomial_tail(m, policy.min_passing_tokens,
                               out.per_token_forged_upper) /
      std::log(10.0);
  return out;
}

namespace {

/// Given per-token probabilities, pick minimal M (and a T) meeting the
/// targets. Returns (M, T) or nullopt.
std::optional<std::pair<int, int>> solve_coin_size(double p_h, double p_f_ub,
                                                   const DesignTargets& targets,
                                                   int max_m) {
  if (p_f_ub >= p_h) return std::nullopt;
  const double log10_fa_max = std::log10(targets.max_false_accept);
  for (int m = 1; m <= max_m; m = std::max(m + 1, m + m / 8)) {
    // T must be large enough for the false-accept tail and small enough
    // for the false-reject tail; walk T down until FR clears, then take
    // the largest such T (lowering T further only worsens FA).
    for (int t = m; t >= 1; --t) {
      const double fr = stats::binomial_cdf(m, t - 1, p_h);
      if (fr > targets.max_false_reject) continue;
      const double log10_fa =
          stats::log_binomial_tail(m, t, p_f_ub) / std::log(10.0);
      if (log10_fa < log10_fa_max) return std::make_pair(m, t);
      break;
    }
  }
  return std::nullopt;
}

}  // namespace

nlohmann::json DesignResult::to_json() const {
  nlohmann::json j{{"feasible", feasible},
                   {"policy", policy.to_json()},
                   {"certificate", certificate.to_json()}};
  if (!feasible) {
    j["best_false_accept"] = best_false_accept;
    j["best_false_reject"] = best_false_reject;
  }
  return j;
}

std::string DesignResult::certificate_text() const {
  std::ostringstream os;
  os << "coin design " << (feasible ? "FEASIBLE" : "INFEASIBLE") << "\n"
     << "  policy: N=" << policy.spins_per_token
     << " M=" << policy.tokens_per_coin << " tau=" << policy.match_fraction
     << " T=" << policy.min_passing_tokens << "\n"
     << "  per-token honest pass p_h = " << certificate.per_token_honest << "\n"
     << "  per-token forged pass p_f = " << certificate.per_token_forged_mean
     << " (upper bound " << certificate.per_token_forged_upper << " from "
     << certificate.forged_samples << " samples)\n"
     << "  false_reject (analytic)   = " << certificate.false_reject << "\n"
     << "  false_accept (analytic)  <= 1e" << certificate.log10_false_accept
     << "\n"
     << "  adversary class: non-adaptive measure-and-reprepare\n"
     << "  seed: " << certificate.seed << "\n";
  return os.str();
}

DesignResult design_coin(const DesignTargets& targets,
                         const ReadoutModel& readout, AttackKind attack,
                         const DesignBounds& bounds, std::uint64_t seed,
                         std::int64_t screen_samples,
                         std::int64_t certify_samples, int threads) {
  struct Candidate {
    CoinPolicy policy;
    double score;
  };
  std::vector<Candidate> candidates;
  DesignResult result;

  const double alpha = 1e-9;
  for (int n : bounds.spins_per_token) {
    for (double tau : bounds.match_fractions) {
      CoinPolicy probe(n, 1, tau, 1);
      const int k_min = probe.match_threshold();
      const double q_h = readout.prob_observe_one(1);
      const double p_h = stats::binomial_tail(n, k_min, q_h);
      if (p_h <= 0.5) continue;
      const std::int64_t hits = count_forged_passes(
          n, k_min, readout, attack, screen_samples, mix64(seed, n * 131 + int(tau * 100)),
          threads);
      const double p_f_ub =
          stats::clopper_pearson_upper(hits, screen_samples, alpha);
      const auto size =
          solve_coin_size(p_h, p_f_ub, targets, bounds.max_tokens_per_coin);
      if (!size) {
        // Track the best achieved pair for the infeasibility report.
        const double fa = stats::binomial_tail(1, 1, p_f_ub);
        const double fr = 1.0 - p_h;
        if (fa < result.best_false_accept) {
          result.best_false_accept = fa;
          result.best_false_reject = fr;
        }
        continue;
      }
      const auto [m, t] = *size;
      candidates.push_back(
          {CoinPolicy(n, m, tau, t), static_cast<double>(n) * m});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.score < b.score; });

  for (const auto& cand : candidates) {
    ErrorRates cert =
        coin_error_rates(cand.policy, readout, attack, NoiseChannel::identity(),
                         certify_samples, alpha, mix64(seed, 0xCE47ULL), threads);
    const double log10_fa_max = std::log10(targets.max_false_accept);
    if (cert.log10_false_accept < log10_fa_max &&
        cert.false_reject < targets.max_false_reject) {
      result.feasible = true;
      result.policy = cand.policy;
      result.certificate = cert;
      return result;
    }
    if (cert.false_accept() < result.best_false_accept) {
      result.best_false_accept = cert.false_accept();
      result.best_false_reject = cert.false_reject;
    }
  }
  return result;
}

double monte_carlo_false_reject(const CoinPolicy& policy,
                                const ReadoutModel& readout,
                                std::int64_t coins, std::uint64_t seed,
                                int threads) {
  const int n = policy.spins_per_token;
  const int m = policy.tokens_per_coin;
  const int k_min = policy.match_threshold();
  std::vector<std::int64_t> rejected(kMonteCarloChunks, 0);
  parallel_chunks(coins, threads, [&](int chunk, std::int64_t b, std::int64_t e) {
    Rng rng = Rng::derive(seed, 0x68726a63ULL + chunk);
    std::int64_t rej = 0;
    for (std::int64_t c = b; c < e; ++c) {
      int passing = 0;
      for (int i = 0; i < m; ++i) {
        // Honest verification measures along the preparation axis: the
        // pre-readout outcome is deterministically 1 for every spin.
        int k = 0;
        for (int s = 0; s < n; ++s) k += single_shot_readout(1, readout, rng);
        if (k >= k_min) ++passing;
      }
      if (passing < policy.min_passing_tokens) ++rej;
    }
    rejected[chunk] = rej;
  });
  std::int64_t total = 0;
  for (auto r : rejected) total += r;
  return static_cast<double>(total) / static_cast<double>(coins);
}

}  // namespace qtoken::ensemble
