#include <benchmark/benchmark.h>

#include <random>

#include "jndsur/features.hpp"
#include "jndsur/segments.hpp"

namespace {

jndsur::LumaClip noise_clip(int width, int height, int frames, std::uint64_t seed) {
  jndsur::LumaClip clip{width, height, {}};
  clip.pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                     static_cast<std::size_t>(frames));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  for (auto& v : clip.pixels) v = static_cast<std::uint8_t>(px(rng));
  return clip;
}

void BM_SegmentPsnr1080p(benchmark::State& state) {
  const auto ref = noise_clip(1920, 1080, 5, 1);
  const auto coded = noise_clip(1920, 1080, 5, 2);
  const auto grid = jndsur::segment_partition(1920, 1080, 5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(jndsur::segment_quality_psnr(ref, coded, grid));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(ref.pixels.size()));
}
BENCHMARK(BM_SegmentPsnr1080p)->Unit(benchmark::kMillisecond);

void BM_Masking1080p(benchmark::State& state) {
  const auto ref = noise_clip(1920, 1080, 5, 3);
  const auto grid = jndsur::segment_partition(1920, 1080, 5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(jndsur::masking_features(ref, grid));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(ref.pixels.size()));
}
BENCHMARK(BM_Masking1080p)->Unit(benchmark::kMillisecond);

void BM_FeatureVector(benchmark::State& state) {
  jndsur::QualityLadder ladder("clip", 180);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int qp = 1; qp <= 51; ++qp) {
    for (int s = 0; s < 180; ++s) ladder.set_score(qp, s, 60.0 - 0.5 * qp - 5.0 * u(rng));
  }
  const jndsur::MaskingStats masking{100.0, 20.0, 5.0, 1.0, false};
  const int anchor = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(jndsur::build_feature_vector(ladder, masking, anchor));
  }
}
BENCHMARK(BM_FeatureVector)->Arg(0)->Arg(25);

}  // namespace
