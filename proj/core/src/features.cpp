#include "jndsur/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jndsur/error.hpp"

namespace jndsur {

QualityLadder::QualityLadder(std::string clip_id, int segment_count, std::string metric_name)
    : clip_id_(std::move(clip_id)), metric_name_(std::move(metric_name)), segments_(segment_count) {
  if (segment_count < 1) {
    throw InvalidInput("QualityLadder: segment_count must be positive");
  }
  const auto cells = static_cast<std::size_t>(kMaxQp) * static_cast<std::size_t>(segments_);
  scores_.assign(cells, 0.0);
  present_.assign(cells, false);
}

std::size_t QualityLadder::index(int qp, int segment) const {
  if (qp < 1 || qp > kMaxQp) {
    throw InvalidInput("QualityLadder: qp " + std::to_string(qp) + " outside [1, 51]");
  }
  if (segment < 0 || segment >= segments_) {
    throw InvalidInput("QualityLadder: segment " + std::to_string(segment) + " out of range");
  }
  return static_cast<std::size_t>(qp - 1) * static_cast<std::size_t>(segments_) +
         static_cast<std::size_t>(segment);
}

double QualityLadder::score(int qp, int segment) const {
  const auto i = index(qp, segment);
  if (!present_[i]) {
    throw InvalidInput("clip '" + clip_id_ + "': ladder has no score for qp " +
                       std::to_string(qp) + ", segment " + std::to_string(segment));
  }
  return scores_[i];
}

void QualityLadder::set_score(int qp, int segment, double value) {
  if (!std::isfinite(value)) {
    throw InvalidInput("QualityLadder: non-finite score");
  }
  const auto i = index(qp, segment);
  scores_[i] = value;
  present_[i] = true;
}

void QualityLadder::set_row(int qp, std::span<const double> per_segment) {
  if (per_segment.size() != static_cast<std::size_t>(segments_)) {
    throw InvalidInput("QualityLadder: row length does not match segment count");
  }
  for (int s = 0; s < segments_; ++s) set_score(qp, s, per_segment[static_cast<std::size_t>(s)]);
}

bool QualityLadder::complete() const noexcept {
  return segments_ > 0 && std::all_of(present_.begin(), present_.end(), [](bool b) { return b; });
}

void QualityLadder::require_complete() const {
  if (segments_ < 1) throw InvalidInput("QualityLadder: empty ladder");
  for (std::size_t i = 0; i < present_.size(); ++i) {
    if (!present_[i]) {
      const auto qp = static_cast<int>(i / static_cast<std::size_t>(segments_)) + 1;
      const auto seg = static_cast<int>(i % static_cast<std::size_t>(segments_));
      throw InvalidInput("clip '" + clip_id_ + "': ladder gap at qp " + std::to_string(qp) +
                         ", segment " + std::to_string(seg));
    }
  }
}

FeatureScaling FeatureScaling::fit(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw InvalidInput("FeatureScaling::fit: no rows");
  const std::size_t dim = rows.front().size();
  FeatureScaling s;
  s.mean.assign(dim, 0.0);
  s.scale.assign(dim, 0.0);
  for (const auto& row : rows) {
    if (row.size() != dim) throw InvalidInput("FeatureScaling::fit: ragged rows");
    for (std::size_t d = 0; d < dim; ++d) s.mean[d] += row[d];
  }
  const double n = static_cast<double>(rows.size());
  for (auto& m : s.mean) m /= n;
  for (const auto& row : rows) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = row[d] - s.mean[d];
      s.scale[d] += diff * diff;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    const double sd = std::sqrt(s.scale[d] / n);
    // Constant columns keep unit scale; they standardize to zero.
    s.scale[d] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[d])) ? sd : 1.0;
  }
  return s;
}

std::vector<double> FeatureScaling::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) {
    throw InvalidInput("FeatureScaling::apply: dimension mismatch");
  }
  std::vector<double> out(row.size());
  for (std::size_t d = 0; d < row.size(); ++d) out[d] = (row[d] - mean[d]) / scale[d];
  return out;
}

double aggregate_quality(const QualityLadder& ladder, std::span<const int> selected, int qp) {
  if (selected.empty()) {
    throw InvalidInput("aggregate_quality: empty segment selection");
  }
  double sum = 0.0;
  for (int s : selected) sum += ladder.score(qp, s);
  return sum / static_cast<double>(selected.size());
}

std::vector<int> significant_segments(const QualityLadder& ladder, int anchor_qp,
                                      double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidInput("significant_segments: fraction must lie in (0, 1]");
  }
  const int first = anchor_qp + 1;
  const int last = std::min(anchor_qp + kSlopeWindow, kMaxQp - 1);
  if (anchor_qp < 0 || first > last) {
    throw InvalidInput("significant_segments: no slope window above anchor " +
                       std::to_string(anchor_qp));
  }
  const int n = ladder.segment_count();
  std::vector<double> slope(static_cast<std::size_t>(n), 0.0);
  for (int s = 0; s < n; ++s) {
    double total = 0.0;
    for (int q = first; q <= last; ++q) {
      total += std::abs(ladder.score(q + 1, s) - ladder.score(q, s));
    }
    slope[static_cast<std::size_t>(s)] = total / static_cast<double>(last - first + 1);
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return slope[static_cast<std::size_t>(a)] > slope[static_cast<std::size_t>(b)];
  });
  const auto keep = static_cast<std::size_t>(
      std::clamp(static_cast<int>(std::ceil(fraction * n - 1e-9)), 1, n));
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return order;
}

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pop_std(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

MaskingStats masking_features(const LumaClip& source, const SegmentGrid& grid) {
  if (source.width != grid.frame_width || source.height != grid.frame_height ||
      source.frames() != grid.frames) {
    throw InvalidInput("masking_features: clip does not match the segment grid");
  }
  if (source.frames() < 1) {
    throw InvalidInput("masking_features: clip has no frames");
  }
  const int w = source.width;
  const int h = source.height;
  const int tiles = grid.spatial_tiles();
  std::vector<double> spatial_sum(static_cast<std::size_t>(tiles), 0.0);
  std::vector<double> spatial_count(static_cast<std::size_t>(tiles), 0.0);
  std::vector<double> temporal_sum(static_cast<std::size_t>(tiles), 0.0);

  auto tile_of = [&](int x, int y) {
    return static_cast<std::size_t>((y / kTileHeight) * grid.tiles_x + x / kTileWidth);
  };

  for (int f = 0; f < source.frames(); ++f) {
    const auto px = source.frame(f);
    auto at = [&](int x, int y) {
      return static_cast<double>(px[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                    static_cast<std::size_t>(x)]);
    };
    for (int y = 1; y + 1 < h; ++y) {
      for (int x = 1; x + 1 < w; ++x) {
        const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1) -
                           at(x - 1, y - 1) - 2.0 * at(x - 1, y) - at(x - 1, y + 1)) /
                          8.0;
        const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1) -
                           at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)) /
                          8.0;
        const auto t = tile_of(x, y);
        spatial_sum[t] += gx * gx + gy * gy;
        spatial_count[t] += 1.0;
      }
    }
    if (f > 0) {
      const auto prev = source.frame(f - 1);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const auto i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                         static_cast<std::size_t>(x);
          temporal_sum[tile_of(x, y)] += std::abs(int{px[i]} - int{prev[i]});
        }
      }
    }
  }

  std::vector<double> spatial(static_cast<std::size_t>(tiles));
  std::vector<double> temporal(static_cast<std::size_t>(tiles), 0.0);
  const double tile_pixels = static_cast<double>(kTileWidth) * kTileHeight;
  for (std::size_t t = 0; t < spatial.size(); ++t) {
    spatial[t] = spatial_sum[t] / spatial_count[t];
    if (source.frames() > 1) {
      temporal[t] = temporal_sum[t] / (tile_pixels * (source.frames() - 1));
    }
  }

  MaskingStats stats;
  stats.spatial_mean = mean_of(spatial);
  stats.spatial_std = pop_std(spatial, stats.spatial_mean);
  stats.temporal_mean = mean_of(temporal);
  stats.temporal_std = pop_std(temporal, stats.temporal_mean);
  stats.single_frame = source.frames() == 1;
  return stats;
}

std::vector<int> feature_qps(int anchor_qp) {
  if (anchor_qp < 0 || anchor_qp >= kMaxQp) {
    throw InvalidInput("feature_qps: anchor_qp must lie in [0, 50]");
  }
  std::vector<int> qps;
  qps.reserve(kQualitySamples);
  const double first = anchor_qp + 1;
  const double span = kMaxQp - first;
  for (int i = 0; i < kQualitySamples; ++i) {
    qps.push_back(static_cast<int>(std::lround(first + span * i / (kQualitySamples - 1))));
  }
  return qps;
}

FeatureVector build_feature_vector(const QualityLadder& ladder, const MaskingStats& masking,
                                   int anchor_qp, const FeatureScaling* scaling,
                                   double fraction) {
  ladder.require_complete();
  const auto qps = feature_qps(anchor_qp);
  const auto selected = significant_segments(ladder, anchor_qp, fraction);

  FeatureVector fv;
  fv.anchor_qp = anchor_qp;
  fv.values.reserve(kFeatureDim);
  for (int q : qps) fv.values.push_back(aggregate_quality(ladder, selected, q));
  fv.values.push_back(masking.spatial_mean);
  fv.values.push_back(masking.spatial_std);
  fv.values.push_back(masking.temporal_mean);
  fv.values.push_back(masking.temporal_std);
  if (scaling != nullptr) fv.values = scaling->apply(fv.values);
  return fv;
}

}  // namespace jndsur
