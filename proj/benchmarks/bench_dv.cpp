#include <benchmark/benchmark.h>

#include "qtoken/dv_token.hpp"

namespace {

// End-to-end issue + verify throughput for a 32-qubit token. The protocol
// budget assumes 1e5 trials complete well under a minute.
void BM_DvIssueVerify(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  qtoken::Rng rng(12345);
  qtoken::dv::VerificationPolicy policy;
  std::int64_t accepted = 0;
  for (auto _ : state) {
    auto [secret, token] = qtoken::dv::issue(n, rng);
    const auto res = qtoken::dv::verify(token, secret, policy, rng);
    accepted += res.accept;
  }
  benchmark::DoNotOptimize(accepted);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DvIssueVerify)->Arg(32)->Arg(128);

void BM_DvMeasureResend(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  qtoken::Rng rng(777);
  qtoken::dv::VerificationPolicy policy;
  std::int64_t accepted = 0;
  for (auto _ : state) {
    auto [secret, token] = qtoken::dv::issue(n, rng);
    auto forged = qtoken::dv::adversary_measure_resend(
        token, qtoken::dv::MeasureStrategy::breidbart, rng);
    const auto res = qtoken::dv::verify(forged, secret, policy, rng);
    accepted += res.accept;
  }
  benchmark::DoNotOptimize(accepted);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DvMeasureResend)->Arg(32);

}  // namespace
