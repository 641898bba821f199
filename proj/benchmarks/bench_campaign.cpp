#include <benchmark/benchmark.h>

#include "jndsur/bisection.hpp"
#include "jndsur/stats.hpp"

namespace {

void BM_SimulateCampaign(benchmark::State& state) {
  jndsur::CampaignSpec spec;
  spec.subjects = static_cast<int>(state.range(0));
  spec.noise = 0.5;
  for (auto _ : state) {
    ++spec.seed;
    benchmark::DoNotOptimize(jndsur::simulate_campaign(spec));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SimulateCampaign)->Arg(30)->Arg(1000);

void BM_FitAndTest(benchmark::State& state) {
  jndsur::CampaignSpec spec;
  spec.subjects = 30;
  const jndsur::JndSampleSet set = jndsur::simulate_campaign(spec);
  for (auto _ : state) {
    const jndsur::SurModel model = jndsur::fit_normal(set);
    benchmark::DoNotOptimize(jndsur::jnd_point(model));
    benchmark::DoNotOptimize(jndsur::jarque_bera(set));
  }
}
BENCHMARK(BM_FitAndTest);

}  // namespace
