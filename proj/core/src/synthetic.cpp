#include <algorithm>
#include <cmath>
#include <random>

#include "jndsur/bisection.hpp"
#include "jndsur/corpus.hpp"
#include "jndsur/error.hpp"

namespace jndsur {
namespace {

constexpr int kMaxAttempts = 1000;
// Highest anchor that still leaves room for a slope window and a later JND.
constexpr int kMaxChainAnchor = 45;

std::mt19937_64 clip_stream(std::uint64_t seed, Resolution r, int clip, int attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(clip),
                    static_cast<std::uint32_t>(attempt)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Smallest real QP above the anchor where the significant-segment quality has
// dropped by `threshold` below the anchor quality; negative when it never does.
double latent_jnd(const QualityLadder& ladder, int anchor, double threshold) {
  const auto selected = significant_segments(ladder, anchor);
  const int ref_qp = std::max(anchor, 1);
  const double ref = aggregate_quality(ladder, selected, ref_qp);
  double prev_q = ref_qp;
  double prev_drop = 0.0;
  for (int q = anchor + 1; q <= kMaxQp; ++q) {
    const double drop = ref - aggregate_quality(ladder, selected, q);
    if (drop >= threshold) {
      if (drop <= prev_drop || q == ref_qp) return q;
      const double t = (threshold - prev_drop) / (drop - prev_drop);
      return std::max(prev_q + t * (q - prev_q), anchor + 1e-6);
    }
    prev_q = q;
    prev_drop = drop;
  }
  return -1.0;
}

struct ClipDraw {
  ClipRecord record;
  bool ok = false;
};

ClipDraw draw_clip(Resolution resolution, int clip, int attempt, const SyntheticCorpusSpec& spec) {
  auto rng = clip_stream(spec.seed, resolution, clip, attempt);
  const FrameSize size = frame_size(resolution);
  const int segments = (size.width / kTileWidth) * (size.height / kTileHeight) *
                       spec.temporal_segments;

  ClipDraw draw;
  ClipRecord& rec = draw.record;
  rec.clip_id = "clip" + std::to_string(clip + 1);
  rec.ladder = QualityLadder(rec.clip_id, segments, "synthetic");

  const double masking = uniform(rng, 0.0, 1.0);
  const double center = uniform(rng, 26.0, 38.0);
  const double width = uniform(rng, 5.0, 8.0);
  std::vector<double> seg_center(static_cast<std::size_t>(segments));
  std::vector<double> seg_width(seg_center.size());
  std::vector<double> seg_top(seg_center.size());
  for (std::size_t s = 0; s < seg_center.size(); ++s) {
    seg_center[s] = center + uniform(rng, -5.0, 5.0);
    seg_width[s] = width * uniform(rng, 0.7, 1.4);
    seg_top[s] = uniform(rng, 90.0, 100.0);
  }
  for (int q = 1; q <= kMaxQp; ++q) {
    for (int s = 0; s < segments; ++s) {
      const auto i = static_cast<std::size_t>(s);
      const double clean = seg_top[i] / (1.0 + std::exp((q - seg_center[i]) / seg_width[i]));
      rec.ladder.set_score(q, s, clean + uniform(rng, -spec.score_noise, spec.score_noise));
    }
  }

  auto jitter = [&](double v) {
    return v * (1.0 + uniform(rng, -spec.masking_noise, spec.masking_noise));
  };
  rec.masking.spatial_mean = jitter(20.0 + 180.0 * masking);
  rec.masking.spatial_std = jitter(5.0 + 40.0 * masking);
  rec.masking.temporal_mean = jitter(1.0 + 12.0 * masking);
  rec.masking.temporal_std = jitter(0.5 + 4.0 * masking);

  const double threshold = 6.0 + 10.0 * masking;
  int anchor = 0;
  for (int order = 1; order <= 3; ++order) {
    if (anchor > kMaxChainAnchor) return draw;
    const double mu = latent_jnd(rec.ladder, anchor, threshold);
    if (!(mu > anchor && mu < kMaxQp - 1)) return draw;

    CampaignSpec campaign;
    campaign.mu = mu;
    campaign.sigma = 1.5 + 2.5 * masking + 0.5 * (order - 1);
    campaign.subjects = spec.subjects;
    campaign.anchor_qp = anchor;
    campaign.noise = spec.protocol_noise;
    campaign.seed = rng();
    campaign.clip_id = rec.clip_id;
    campaign.resolution = resolution;
    campaign.jnd_order = order;
    JndSampleSet set = simulate_campaign(campaign);
    if (set.size() < 2) return draw;

    const SurModel model = fit_normal(set);
    const JndPoint jnd = jnd_point(model);
    // Keep the 75% point inside the measured range so its integer location
    // needs no clamping.
    if (jnd.qp < anchor + 0.5 || jnd.qp > kMaxQp - 0.5) return draw;
    rec.orders.push_back(std::move(set));
    anchor = jnd.qp_int;
  }
  draw.ok = true;
  return draw;
}

}  // namespace

ResolutionCorpus make_synthetic_corpus(Resolution resolution, const SyntheticCorpusSpec& spec) {
  if (spec.clips < 1) throw InvalidInput("synthetic corpus: clip count must be positive");
  if (spec.subjects < 2) throw InvalidInput("synthetic corpus: at least 2 subjects required");
  if (spec.temporal_segments < 1) {
    throw InvalidInput("synthetic corpus: temporal_segments must be positive");
  }
  ResolutionCorpus corpus;
  corpus.resolution = resolution;
  corpus.clips.reserve(static_cast<std::size_t>(spec.clips));
  for (int c = 0; c < spec.clips; ++c) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      ClipDraw draw = draw_clip(resolution, c, attempt, spec);
      if (draw.ok) {
        corpus.clips.push_back(std::move(draw.record));
        done = true;
      }
    }
    if (!done) {
      throw PipelineError("synthetic corpus: could not draw a valid clip " + std::to_string(c + 1));
    }
  }
  return corpus;
}

Corpus make_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  Corpus corpus;
  for (Resolution r : spec.resolutions) corpus.groups.push_back(make_synthetic_corpus(r, spec));
  return corpus;
}

}  // namespace jndsur
