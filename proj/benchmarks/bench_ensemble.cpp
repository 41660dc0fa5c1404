#include <benchmark/benchmark.h>

#include "qtoken/ensemble_token.hpp"

namespace {

void BM_EnsembleVerifyCoin(benchmark::State& state) {
  const qtoken::ensemble::CoinPolicy policy(16, static_cast<int>(state.range(0)),
                                            0.85, static_cast<int>(state.range(0)) / 2);
  const auto readout = qtoken::ReadoutModel::flip(0.935, 0.824);
  qtoken::Rng rng(99);
  std::int64_t accepted = 0;
  for (auto _ : state) {
    auto [secret, coin] = qtoken::ensemble::issue_coin(policy, rng);
    const auto res =
        qtoken::ensemble::verify_coin(coin, secret, policy, readout, rng);
    accepted += res.accept;
  }
  benchmark::DoNotOptimize(accepted);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EnsembleVerifyCoin)->Arg(64)->Arg(512);

void BM_EnsembleAttackEstimate(benchmark::State& state) {
  const qtoken::ensemble::CoinPolicy policy(16, 32, 0.85, 16);
  qtoken::Rng rng(7);
  std::int64_t accepted = 0;
  const auto readout = qtoken::ReadoutModel::perfect();
  for (auto _ : state) {
    auto [secret, coin] = qtoken::ensemble::issue_coin(policy, rng);
    auto forged = qtoken::ensemble::attack_estimate_reprepare(
        coin, qtoken::ensemble::AttackKind::three_axis, rng);
    const auto res =
        qtoken::ensemble::verify_coin(forged, secret, policy, readout, rng);
    accepted += res.accept;
  }
  benchmark::DoNotOptimize(accepted);
}
BENCHMARK(BM_EnsembleAttackEstimate);

}  // namespace
