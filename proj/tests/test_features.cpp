#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "jndsur/error.hpp"
#include "jndsur/features.hpp"
#include "jndsur/segments.hpp"
#include "reference.hpp"

using namespace jndsur;

namespace {

LumaClip make_clip(int w, int h, int frames, std::uint8_t value = 0) {
  LumaClip c;
  c.width = w;
  c.height = h;
  c.pixels.assign(static_cast<std::size_t>(w) * h * frames, value);
  return c;
}

LumaClip random_clip(int w, int h, int frames, std::uint64_t seed, int lo = 16, int hi = 235) {
  LumaClip c = make_clip(w, h, frames);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(lo, hi);
  for (auto& p : c.pixels) p = static_cast<std::uint8_t>(d(rng));
  return c;
}

// Ladder where segment s scores base - slope_s * qp.
QualityLadder linear_ladder(const std::vector<double>& slopes, double base = 100.0) {
  QualityLadder ladder("fixture", static_cast<int>(slopes.size()));
  for (int q = 1; q <= 51; ++q) {
    for (std::size_t s = 0; s < slopes.size(); ++s) {
      ladder.set_score(q, static_cast<int>(s), base - slopes[s] * q);
    }
  }
  return ladder;
}

// Reference masking statistics: per tile, integer Sobel responses over the
// interior pixels of the frame, energy divided by 64 (the squared 1/8 kernel
// normalisation); frame differences averaged over the tile's pixels.
MaskingStats reference_masking(const LumaClip& clip) {
  const int w = clip.width;
  const int h = clip.height;
  const int tx = w / 320;
  const int ty = h / 180;
  std::vector<double> spatial;
  std::vector<double> temporal;
  for (int by = 0; by < ty; ++by) {
    for (int bx = 0; bx < tx; ++bx) {
      long double energy = 0;
      long double count = 0;
      long double diff = 0;
      for (int f = 0; f < clip.frames(); ++f) {
        const auto p = clip.frame(f);
        auto v = [&](int x, int y) { return static_cast<long>(p[static_cast<std::size_t>(y * w + x)]); };
        for (int y = by * 180; y < (by + 1) * 180; ++y) {
          for (int x = bx * 320; x < (bx + 1) * 320; ++x) {
            if (x > 0 && y > 0 && x < w - 1 && y < h - 1) {
              const long gx = v(x + 1, y - 1) + 2 * v(x + 1, y) + v(x + 1, y + 1) - v(x - 1, y - 1) -
                              2 * v(x - 1, y) - v(x - 1, y + 1);
              const long gy = v(x - 1, y + 1) + 2 * v(x, y + 1) + v(x + 1, y + 1) - v(x - 1, y - 1) -
                              2 * v(x, y - 1) - v(x + 1, y - 1);
              energy += static_cast<long double>(gx * gx + gy * gy) / 64.0L;
              count += 1;
            }
            if (f > 0) {
              const auto q = clip.frame(f - 1);
              diff += std::labs(v(x, y) - static_cast<long>(q[static_cast<std::size_t>(y * w + x)]));
            }
          }
        }
      }
      spatial.push_back(static_cast<double>(energy / count));
      temporal.push_back(clip.frames() > 1
                             ? static_cast<double>(diff / (320.0L * 180.0L * (clip.frames() - 1)))
                             : 0.0);
    }
  }
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  auto sd = [](const std::vector<double>& v, double m) {
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  MaskingStats out;
  out.spatial_mean = mean(spatial);
  out.spatial_std = sd(spatial, out.spatial_mean);
  out.temporal_mean = mean(temporal);
  out.temporal_std = sd(temporal, out.temporal_mean);
  return out;
}

}  // namespace

// --- segment grid ---------------------------------------------------------------

TEST(SegmentPartition, SpatialTileCounts) {
  EXPECT_EQ(segment_partition(1280, 720, 30, 30).spatial_tiles(), 16);
  EXPECT_EQ(segment_partition(1920, 1080, 30, 30).spatial_tiles(), 36);
  EXPECT_EQ(segment_partition(640, 360, 30, 30).spatial_tiles(), 4);
  EXPECT_EQ(segment_partition(960, 540, 30, 30).spatial_tiles(), 9);
}

TEST(SegmentPartition, LastRunAbsorbsRemainder) {
  const SegmentGrid g = segment_partition(640, 360, 70, 30);
  EXPECT_EQ(g.temporal_count, 2);
  EXPECT_EQ(g.segment_count(), 8);
  EXPECT_EQ(g.frame_begin(0), 0);
  EXPECT_EQ(g.frame_end(0), 30);
  EXPECT_EQ(g.frame_begin(1), 30);
  EXPECT_EQ(g.frame_end(1), 70);
}

TEST(SegmentPartition, RejectsBadGeometry) {
  EXPECT_THROW((void)segment_partition(1000, 720, 30, 30), InvalidInput);
  EXPECT_THROW((void)segment_partition(1280, 700, 30, 30), InvalidInput);
  EXPECT_THROW((void)segment_partition(1280, 720, 10, 30), InvalidInput);
  EXPECT_THROW((void)segment_partition(1280, 720, 10, 0), InvalidInput);
}

// --- PSNR --------------------------------------------------------------------------

TEST(SegmentPsnr, IdenticalContentHitsCap) {
  const LumaClip ref = random_clip(640, 360, 2, 1);
  const auto scores = segment_quality_psnr(ref, ref, segment_partition(640, 360, 2, 1));
  ASSERT_EQ(scores.size(), 8u);
  for (double s : scores) EXPECT_EQ(s, 60.0);
}

TEST(SegmentPsnr, ConstantOffset) {
  const LumaClip ref = random_clip(640, 360, 1, 2, 16, 200);
  LumaClip dist = ref;
  for (auto& p : dist.pixels) p = static_cast<std::uint8_t>(p + 16);
  const auto scores = segment_quality_psnr(ref, dist, segment_partition(640, 360, 1, 1));
  for (double s : scores) EXPECT_NEAR(s, 10.0 * std::log10(255.0 * 255.0 / 256.0), 1e-12);
  EXPECT_NEAR(scores[0], 24.04840395556061, 1e-12);
}

TEST(SegmentPsnr, NoiseMatchesDirectMseOracle) {
  const int w = 640, h = 360, frames = 3;
  const LumaClip ref = random_clip(w, h, frames, 3, 30, 220);
  LumaClip dist = ref;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> noise(-6, 6);
  for (auto& p : dist.pixels) p = static_cast<std::uint8_t>(std::clamp(p + noise(rng), 0, 255));
  const SegmentGrid grid = segment_partition(w, h, frames, 1);
  const auto scores = segment_quality_psnr(ref, dist, grid);
  ASSERT_EQ(scores.size(), static_cast<std::size_t>(grid.segment_count()));
  for (int t = 0; t < grid.temporal_count; ++t) {
    for (int ty = 0; ty < grid.tiles_y; ++ty) {
      for (int tx = 0; tx < grid.tiles_x; ++tx) {
        std::vector<std::uint8_t> a;
        std::vector<std::uint8_t> b;
        for (int f = grid.frame_begin(t); f < grid.frame_end(t); ++f) {
          for (int y = ty * 180; y < (ty + 1) * 180; ++y) {
            for (int x = tx * 320; x < (tx + 1) * 320; ++x) {
              const auto i = static_cast<std::size_t>(f) * w * h + static_cast<std::size_t>(y) * w + x;
              a.push_back(ref.pixels[i]);
              b.push_back(dist.pixels[i]);
            }
          }
        }
        const int id = (t * grid.tiles_y + ty) * grid.tiles_x + tx;
        EXPECT_NEAR(scores[static_cast<std::size_t>(id)], oracle::psnr(a, b), 1e-9) << "segment " << id;
      }
    }
  }
}

TEST(SegmentPsnr, DimensionMismatch) {
  const LumaClip a = make_clip(640, 360, 2);
  const LumaClip b = make_clip(640, 360, 3);
  EXPECT_THROW((void)segment_quality_psnr(a, b, segment_partition(640, 360, 2, 1)), InvalidInput);
}

// --- ladder and aggregation -----------------------------------------------------

TEST(QualityLadder, GapIsReported) {
  QualityLadder ladder("c", 2);
  ladder.set_score(1, 0, 50.0);
  EXPECT_FALSE(ladder.complete());
  EXPECT_THROW(ladder.require_complete(), InvalidInput);
  EXPECT_THROW(ladder.set_score(0, 0, 1.0), InvalidInput);
  EXPECT_THROW(ladder.set_score(1, 2, 1.0), InvalidInput);
  EXPECT_THROW(ladder.set_score(1, 0, NAN), InvalidInput);
}

TEST(Aggregate, Means) {
  const QualityLadder equal = linear_ladder({0.0, 0.0, 0.0}, 77.0);
  const std::vector<int> all{0, 1, 2};
  EXPECT_EQ(aggregate_quality(equal, all, 10), 77.0);

  QualityLadder two("c", 2);
  for (int q = 1; q <= 51; ++q) {
    two.set_score(q, 0, 80.0);
    two.set_score(q, 1, 60.0);
  }
  EXPECT_EQ(aggregate_quality(two, std::vector<int>{0, 1}, 5), 70.0);
  EXPECT_THROW((void)aggregate_quality(two, std::vector<int>{}, 5), InvalidInput);
}

TEST(Aggregate, SixteenSegmentHandSum) {
  std::vector<double> slopes(16);
  for (int s = 0; s < 16; ++s) slopes[static_cast<std::size_t>(s)] = 0.1 * s;
  const QualityLadder ladder = linear_ladder(slopes);
  std::vector<int> all(16);
  std::iota(all.begin(), all.end(), 0);
  // mean over s of 100 - 0.1 s * 20 = 100 - 2 * 7.5 = 85
  EXPECT_NEAR(aggregate_quality(ladder, all, 20), 85.0, 1e-12);
}

// --- significant segments -----------------------------------------------------------

TEST(Significant, DominantSlope) {
  std::vector<double> slopes(16, 0.0);
  slopes[9] = 5.0;
  EXPECT_EQ(significant_segments(linear_ladder(slopes), 0, 0.05), std::vector<int>{9});
}

TEST(Significant, TiesGoToLowerIds) {
  const auto sel = significant_segments(linear_ladder(std::vector<double>(16, 1.0)), 0, 0.25);
  EXPECT_EQ(sel, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Significant, BruteForceRanking) {
  // Non-linear fixture: slopes differ between the window and the rest.
  QualityLadder ladder("mix", 12);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<std::vector<double>> steep(12, std::vector<double>(52));
  for (int s = 0; s < 12; ++s) {
    double v = 100.0;
    for (int q = 1; q <= 51; ++q) {
      v -= u(rng);
      ladder.set_score(q, s, v);
      steep[static_cast<std::size_t>(s)][static_cast<std::size_t>(q)] = v;
    }
  }
  for (int anchor : {0, 20, 45}) {
    std::vector<std::pair<double, int>> ranked;
    const int hi = std::min(anchor + 10, 50);
    for (int s = 0; s < 12; ++s) {
      double total = 0;
      for (int q = anchor + 1; q <= hi; ++q) {
        total += std::abs(steep[static_cast<std::size_t>(s)][static_cast<std::size_t>(q) + 1] -
                          steep[static_cast<std::size_t>(s)][static_cast<std::size_t>(q)]);
      }
      ranked.emplace_back(-total / (hi - anchor), s);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> expected{ranked[0].second, ranked[1].second, ranked[2].second};
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(significant_segments(ladder, anchor, 0.25), expected) << "anchor " << anchor;
  }
}

TEST(Significant, AffineInvariance) {
  QualityLadder a("a", 8);
  QualityLadder b("b", 8);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int s = 0; s < 8; ++s) {
    double v = 90.0;
    for (int q = 1; q <= 51; ++q) {
      v -= u(rng);
      a.set_score(q, s, v);
      b.set_score(q, s, 3.0 * v + 11.0);
    }
  }
  for (int anchor : {0, 15, 40}) {
    EXPECT_EQ(significant_segments(a, anchor), significant_segments(b, anchor));
  }
}

TEST(Significant, Preconditions) {
  const QualityLadder ladder = linear_ladder({1, 2, 3, 4});
  EXPECT_THROW((void)significant_segments(ladder, 0, 0.0), InvalidInput);
  EXPECT_THROW((void)significant_segments(ladder, 0, 1.5), InvalidInput);
  EXPECT_THROW((void)significant_segments(ladder, 50, 0.25), InvalidInput);
}

// --- masking ------------------------------------------------------------------------

TEST(Masking, ConstantClipIsZero) {
  const LumaClip c = make_clip(640, 360, 3, 128);
  const MaskingStats m = masking_features(c, segment_partition(640, 360, 3, 3));
  EXPECT_EQ(m.spatial_mean, 0.0);
  EXPECT_EQ(m.spatial_std, 0.0);
  EXPECT_EQ(m.temporal_mean, 0.0);
  EXPECT_EQ(m.temporal_std, 0.0);
}

TEST(Masking, FrozenTexturedVideo) {
  LumaClip c = random_clip(640, 360, 1, 8);
  const auto frame = c.pixels;
  for (int f = 1; f < 3; ++f) c.pixels.insert(c.pixels.end(), frame.begin(), frame.end());
  const MaskingStats m = masking_features(c, segment_partition(640, 360, 3, 3));
  EXPECT_EQ(m.temporal_mean, 0.0);
  EXPECT_GT(m.spatial_mean, 0.0);
  EXPECT_FALSE(m.single_frame);
}

TEST(Masking, SingleFrameFlag) {
  const LumaClip c = random_clip(640, 360, 1, 9);
  const MaskingStats m = masking_features(c, segment_partition(640, 360, 1, 1));
  EXPECT_TRUE(m.single_frame);
  EXPECT_EQ(m.temporal_mean, 0.0);
  EXPECT_EQ(m.temporal_std, 0.0);
}

TEST(Masking, MovingEdgeMatchesPerPixelOracle) {
  const int w = 640, h = 360, frames = 4;
  LumaClip c = make_clip(w, h, frames);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> grain(-3, 3);
  for (int f = 0; f < frames; ++f) {
    const int edge = 100 + 60 * f;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int base = x < edge ? 40 : 200;
        c.pixels[static_cast<std::size_t>(f) * w * h + static_cast<std::size_t>(y) * w + x] =
            static_cast<std::uint8_t>(base + grain(rng));
      }
    }
  }
  const MaskingStats got = masking_features(c, segment_partition(w, h, frames, frames));
  const MaskingStats want = reference_masking(c);
  EXPECT_NEAR(got.spatial_mean, want.spatial_mean, 1e-9 * want.spatial_mean);
  EXPECT_NEAR(got.spatial_std, want.spatial_std, 1e-9 * want.spatial_mean);
  EXPECT_NEAR(got.temporal_mean, want.temporal_mean, 1e-12);
  EXPECT_NEAR(got.temporal_std, want.temporal_std, 1e-12);
}

TEST(Masking, InvariantToLumaOffset) {
  const LumaClip a = random_clip(640, 360, 3, 10, 20, 200);
  LumaClip b = a;
  for (auto& p : b.pixels) p = static_cast<std::uint8_t>(p + 30);
  const SegmentGrid g = segment_partition(640, 360, 3, 3);
  EXPECT_EQ(masking_features(a, g), masking_features(b, g));
}

// --- feature vector -------------------------------------------------------------------

TEST(FeatureQps, FullRange) {
  const auto qps = feature_qps(0);
  ASSERT_EQ(qps.size(), 32u);
  EXPECT_EQ(qps.front(), 1);
  EXPECT_EQ(qps.back(), 51);
  for (std::size_t i = 1; i < qps.size(); ++i) {
    EXPECT_GE(qps[i] - qps[i - 1], 1);
    EXPECT_LE(qps[i] - qps[i - 1], 2);
  }
}

TEST(FeatureQps, ShortRangeRepeats) {
  const auto qps = feature_qps(45);
  ASSERT_EQ(qps.size(), 32u);
  EXPECT_EQ(qps.front(), 46);
  EXPECT_EQ(qps.back(), 51);
  for (int q : qps) {
    EXPECT_GE(q, 46);
    EXPECT_LE(q, 51);
  }
  EXPECT_TRUE(std::is_sorted(qps.begin(), qps.end()));
}

TEST(FeatureVector, AssembledByHand) {
  std::vector<double> slopes{0.2, 0.8, 0.4, 0.6};
  const QualityLadder ladder = linear_ladder(slopes);
  MaskingStats m{10.0, 2.0, 3.0, 0.5, false};
  const FeatureVector fv = build_feature_vector(ladder, m, 0);
  ASSERT_EQ(fv.values.size(), 36u);
  // ceil(0.25 * 4) = 1 segment: the steepest, id 1 (slope 0.8).
  const auto qps = feature_qps(0);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_DOUBLE_EQ(fv.values[i], 100.0 - 0.8 * qps[i]);
  EXPECT_EQ(fv.values[32], 10.0);
  EXPECT_EQ(fv.values[33], 2.0);
  EXPECT_EQ(fv.values[34], 3.0);
  EXPECT_EQ(fv.values[35], 0.5);
}

TEST(FeatureVector, MonotoneLadderGivesMonotoneFeatures) {
  const QualityLadder ladder = linear_ladder({0.3, 1.1, 0.7, 0.2, 0.9});
  for (int anchor : {0, 17, 44}) {
    const FeatureVector fv = build_feature_vector(ladder, MaskingStats{}, anchor);
    for (std::size_t i = 1; i < 32; ++i) EXPECT_LE(fv.values[i], fv.values[i - 1]);
  }
}

TEST(FeatureVector, DeterministicAndScaled) {
  const QualityLadder ladder = linear_ladder({0.3, 1.1, 0.7, 0.2});
  const MaskingStats m{5, 1, 2, 0.3, false};
  const FeatureVector a = build_feature_vector(ladder, m, 10);
  const FeatureVector b = build_feature_vector(ladder, m, 10);
  EXPECT_EQ(a.values, b.values);
  FeatureScaling s;
  s.mean.assign(36, 1.0);
  s.scale.assign(36, 2.0);
  const FeatureVector scaled = build_feature_vector(ladder, m, 10, &s);
  for (std::size_t i = 0; i < 36; ++i) EXPECT_DOUBLE_EQ(scaled.values[i], (a.values[i] - 1.0) / 2.0);
}

TEST(FeatureVector, LadderGapRejected) {
  QualityLadder ladder("gap", 2);
  for (int q = 1; q <= 50; ++q) {
    ladder.set_score(q, 0, 1.0);
    ladder.set_score(q, 1, 1.0);
  }
  EXPECT_THROW((void)build_feature_vector(ladder, MaskingStats{}, 0), InvalidInput);
}

TEST(FeatureScaling, ConstantColumnsKeepUnitScale) {
  const std::vector<std::vector<double>> rows{{0.0, 5.0}, {4.0, 5.0}};
  const FeatureScaling s = FeatureScaling::fit(rows);
  EXPECT_EQ(s.mean, (std::vector<double>{2.0, 5.0}));
  EXPECT_EQ(s.scale, (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(s.apply(rows[0]), (std::vector<double>{-1.0, 0.0}));
}
