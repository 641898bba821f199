#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "jndsur/features.hpp"
#include "jndsur/svr.hpp"

namespace {

// Training-set sized problems: one fold of the 220-clip corpus is 176 rows.
void BM_SvrTrain(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> x(n, std::vector<double>(jndsur::kFeatureDim));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x[i]) v = u(rng);
    y[i] = 27.0 + 6.0 * std::sin(x[i][0]) + u(rng);
  }
  jndsur::SvrParams params{10.0, 0.5, 1.0 / jndsur::kFeatureDim, 1e-3};
  for (auto _ : state) benchmark::DoNotOptimize(jndsur::svr_train(x, y, params));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SvrTrain)->RangeMultiplier(2)->Range(32, 512)->Complexity();

}  // namespace
