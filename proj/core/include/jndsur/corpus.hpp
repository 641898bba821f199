#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jndsur/features.hpp"
#include "jndsur/stats.hpp"

namespace jndsur {

/// Everything the evaluation needs about one clip at one resolution.
struct ClipRecord {
  std::string clip_id;
  QualityLadder ladder;
  MaskingStats masking;
  /// orders[k - 1] holds the measured samples of the k-th JND.
  std::vector<JndSampleSet> orders;

  [[nodiscard]] bool has_order(int k) const noexcept {
    return k >= 1 && static_cast<std::size_t>(k) <= orders.size() && !orders[k - 1].samples.empty();
  }
};

struct ResolutionCorpus {
  Resolution resolution = Resolution::k1080p;
  std::vector<ClipRecord> clips;
};

struct Corpus {
  std::vector<ResolutionCorpus> groups;
};

/// Parameters of the synthetic corpus generator. Each clip gets a random
/// masking strength and a family of per-segment logistic quality curves; the
/// latent JND for an anchor is where the significant-segment quality has
/// dropped by a masking-dependent threshold below the anchor quality. JND
/// samples are then measured with the bisection protocol.
struct SyntheticCorpusSpec {
  int clips = 220;
  std::uint64_t seed = 1;
  int subjects = 30;
  double protocol_noise = 0.0;  ///< bisection noise level eta
  double score_noise = 0.25;    ///< bounded uniform noise on ladder scores
  double masking_noise = 0.05;  ///< bounded relative noise on masking stats
  int temporal_segments = 5;
  std::vector<Resolution> resolutions{kAllResolutions.begin(), kAllResolutions.end()};
};

[[nodiscard]] ResolutionCorpus make_synthetic_corpus(Resolution resolution,
                                                     const SyntheticCorpusSpec& spec);
[[nodiscard]] Corpus make_synthetic_corpus(const SyntheticCorpusSpec& spec);

}  // namespace jndsur
