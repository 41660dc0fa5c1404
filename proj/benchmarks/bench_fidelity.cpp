#include <benchmark/benchmark.h>

#include "qtoken/density_matrix.hpp"
#include "qtoken/gaussian.hpp"
#include "qtoken/rng.hpp"

namespace {

qtoken::DensityMatrix random_mixed(int dim, qtoken::Rng& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  Eigen::MatrixXcd m = g * g.adjoint();
  m /= m.trace().real();
  return qtoken::DensityMatrix((m + m.adjoint()) / 2.0);
}

void BM_FidelityDensityMatrix(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  qtoken::Rng rng(42);
  const auto rho = random_mixed(dim, rng);
  const auto sigma = random_mixed(dim, rng);
  double acc = 0.0;
  for (auto _ : state) acc += qtoken::fidelity_dm(rho, sigma);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_FidelityDensityMatrix)->Arg(2)->Arg(16)->Arg(64);

void BM_FidelityGaussian(benchmark::State& state) {
  auto a = qtoken::GaussianState::vacuum();
  a = qtoken::displace(a, 0.7, -0.2);
  auto b = qtoken::squeeze(qtoken::GaussianState::vacuum(), 0.4, 0.3);
  double acc = 0.0;
  for (auto _ : state) acc += qtoken::fidelity_gaussian(a, b);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_FidelityGaussian);

}  // namespace
