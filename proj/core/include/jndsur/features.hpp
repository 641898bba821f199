#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jndsur/segments.hpp"
#include "jndsur/types.hpp"

namespace jndsur {

/// Number of quality-degradation samples in a feature vector.
inline constexpr int kQualitySamples = 32;
/// Number of masking statistics in a feature vector.
inline constexpr int kMaskingFeatures = 4;
inline constexpr int kFeatureDim = kQualitySamples + kMaskingFeatures;

/// Per-segment quality for every QP in 1..51. Higher is better; the metric
/// itself is pluggable (external VMAF scores or the built-in PSNR).
class QualityLadder {
 public:
  QualityLadder() = default;
  QualityLadder(std::string clip_id, int segment_count, std::string metric_name = "psnr");

  [[nodiscard]] const std::string& clip_id() const noexcept { return clip_id_; }
  [[nodiscard]] const std::string& metric_name() const noexcept { return metric_name_; }
  [[nodiscard]] int segment_count() const noexcept { return segments_; }

  [[nodiscard]] double score(int qp, int segment) const;
  void set_score(int qp, int segment, double value);
  void set_row(int qp, std::span<const double> per_segment);

  /// True once every (qp, segment) cell has been assigned a finite value.
  [[nodiscard]] bool complete() const noexcept;
  /// Throws InvalidInput naming the first missing cell.
  void require_complete() const;

 private:
  [[nodiscard]] std::size_t index(int qp, int segment) const;

  std::string clip_id_;
  std::string metric_name_;
  int segments_ = 0;
  std::vector<double> scores_;
  std::vector<bool> present_;
};

/// Spatial and temporal activity of the source, summarised across tiles.
struct MaskingStats {
  double spatial_mean = 0.0;   ///< mean per-tile Sobel gradient energy (luma^2)
  double spatial_std = 0.0;
  double temporal_mean = 0.0;  ///< mean per-tile absolute frame difference (luma)
  double temporal_std = 0.0;
  bool single_frame = false;   ///< temporal stats forced to zero

  friend bool operator==(const MaskingStats&, const MaskingStats&) = default;
};

/// Per-dimension standardization constants, (x - mean) / scale.
struct FeatureScaling {
  std::vector<double> mean;
  std::vector<double> scale;

  [[nodiscard]] static FeatureScaling fit(std::span<const std::vector<double>> rows);
  [[nodiscard]] std::vector<double> apply(std::span<const double> row) const;
};

struct FeatureVector {
  std::vector<double> values;
  int anchor_qp = 0;
};

/// Mean of the selected segments' scores at `qp`.
[[nodiscard]] double aggregate_quality(const QualityLadder& ladder,
                                       std::span<const int> selected, int qp);

inline constexpr double kDefaultSignificantFraction = 0.25;
inline constexpr int kSlopeWindow = 10;

/// Segments whose quality falls fastest just above the anchor. The slope of a
/// segment is the mean |score(q+1) - score(q)| for q in
/// [anchor+1, min(anchor+10, 50)]. Returns the ceil(fraction * N) steepest
/// segments (ties to the lower id) in ascending id order.
[[nodiscard]] std::vector<int> significant_segments(
    const QualityLadder& ladder, int anchor_qp,
    double fraction = kDefaultSignificantFraction);

/// Spatial activity from 3x3 Sobel gradients (normalised by 1/8, frame
/// border excluded) and temporal activity from successive-frame absolute
/// differences, both averaged per 320x180 tile and summarised by mean and
/// population std across tiles.
[[nodiscard]] MaskingStats masking_features(const LumaClip& source, const SegmentGrid& grid);

/// The 32 QPs sampled above the anchor: round(anchor+1 + i*(50-anchor)/31).
[[nodiscard]] std::vector<int> feature_qps(int anchor_qp);

/// Aggregated significant-segment quality at feature_qps(anchor_qp), then the
/// four masking statistics. Standardized when `scaling` is given.
[[nodiscard]] FeatureVector build_feature_vector(const QualityLadder& ladder,
                                                 const MaskingStats& masking, int anchor_qp,
                                                 const FeatureScaling* scaling = nullptr,
                                                 double fraction = kDefaultSignificantFraction);

}  // namespace jndsur
