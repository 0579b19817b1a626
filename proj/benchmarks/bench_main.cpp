#include <benchmark/benchmark.h>

#include <random>

#include "hypoco/certificate.hpp"
#include "hypoco/evolve.hpp"
#include "hypoco/models.hpp"
#include "hypoco/spectral.hpp"

namespace {

using namespace hypoco;

void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  Matrix a = random_complex(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(expm(a));
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16)->Arg(64);

void BM_SpectralGap(benchmark::State& state) {
  Model m = tfim(static_cast<int>(state.range(0)), 1.0, 1.0).model;
  Lindbladian l = m.full();
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(l, m.sigma).spectral_gap);
}
BENCHMARK(BM_SpectralGap)->Arg(2)->Arg(3);

void BM_Certify(benchmark::State& state) {
  Model m = tfim(static_cast<int>(state.range(0)), 1.0, 1.0).model;
  for (auto _ : state) benchmark::DoNotOptimize(certify(m.coherent, m.dissipative, m.sigma).nu);
}
BENCHMARK(BM_Certify)->Arg(2)->Arg(3);

void BM_TimeAverageCheck(benchmark::State& state) {
  Model m = qubit_model();
  Lindbladian l = m.full();
  RateCertificate c = certify(m.coherent, m.dissipative, m.sigma);
  std::mt19937_64 rng(2);
  Matrix x0 = random_mean_zero_hermitian(m.sigma, rng);
  std::vector<double> ts = default_sample_times(c.nu, 2000.0);
  for (auto _ : state) benchmark::DoNotOptimize(time_avg_check(l, m.sigma, x0, c.T, c.nu, ts).pass);
}
BENCHMARK(BM_TimeAverageCheck);

void BM_Stp(benchmark::State& state) {
  Model m = qubit_model();
  for (auto _ : state) benchmark::DoNotOptimize(stp_verify(m.coherent, m.dissipative, m.sigma, 1.5, 0.5, 10, 3, 3).pass);
}
BENCHMARK(BM_Stp);

}  // namespace
BENCHMARK_MAIN();
