#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace jndsur {

inline constexpr int kTileWidth = 320;
inline constexpr int kTileHeight = 180;

/// 8-bit planar luma, frames stored back to back.
struct LumaClip {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  [[nodiscard]] int frames() const noexcept {
    const auto plane = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    return plane == 0 ? 0 : static_cast<int>(pixels.size() / plane);
  }
  [[nodiscard]] std::span<const std::uint8_t> frame(int index) const;
};

/// Spatial-temporal partition of a clip into 320x180 tiles and runs of
/// `temporal_len` frames. Segment ids run tile-major within a temporal run:
/// id = t * tiles_x * tiles_y + ty * tiles_x + tx.
struct SegmentGrid {
  int frame_width = 0;
  int frame_height = 0;
  int frames = 0;
  int temporal_len = 0;
  int tiles_x = 0;
  int tiles_y = 0;
  int temporal_count = 0;

  [[nodiscard]] int spatial_tiles() const noexcept { return tiles_x * tiles_y; }
  [[nodiscard]] int segment_count() const noexcept { return spatial_tiles() * temporal_count; }

  /// First frame and one-past-last frame of temporal run t. The last run
  /// absorbs the remainder frames.
  [[nodiscard]] int frame_begin(int t) const noexcept { return t * temporal_len; }
  [[nodiscard]] int frame_end(int t) const noexcept {
    return t + 1 == temporal_count ? frames : (t + 1) * temporal_len;
  }
};

[[nodiscard]] SegmentGrid segment_partition(int width, int height, int frames, int temporal_len);

/// Luma PSNR for each segment, capped at 60 dB.
[[nodiscard]] std::vector<double> segment_quality_psnr(const LumaClip& reference,
                                                       const LumaClip& distorted,
                                                       const SegmentGrid& grid);

inline constexpr double kPsnrCap = 60.0;

}  // namespace jndsur
