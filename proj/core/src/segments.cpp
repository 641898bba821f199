#include "jndsur/segments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jndsur/error.hpp"

namespace jndsur {

std::span<const std::uint8_t> LumaClip::frame(int index) const {
  if (index < 0 || index >= frames()) {
    throw InvalidInput("LumaClip: frame index " + std::to_string(index) + " out of range");
  }
  const auto plane = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  return std::span<const std::uint8_t>(pixels).subspan(static_cast<std::size_t>(index) * plane,
                                                      plane);
}

SegmentGrid segment_partition(int width, int height, int frames, int temporal_len) {
  if (width <= 0 || height <= 0 || width % kTileWidth != 0 || height % kTileHeight != 0) {
    throw InvalidInput("segment_partition: " + std::to_string(width) + "x" +
                       std::to_string(height) + " is not a multiple of 320x180");
  }
  if (temporal_len < 1 || frames < temporal_len) {
    throw InvalidInput("segment_partition: need frames >= temporal_len >= 1");
  }
  SegmentGrid grid;
  grid.frame_width = width;
  grid.frame_height = height;
  grid.frames = frames;
  grid.temporal_len = temporal_len;
  grid.tiles_x = width / kTileWidth;
  grid.tiles_y = height / kTileHeight;
  grid.temporal_count = frames / temporal_len;
  return grid;
}

std::vector<double> segment_quality_psnr(const LumaClip& reference, const LumaClip& distorted,
                                         const SegmentGrid& grid) {
  if (reference.width != distorted.width || reference.height != distorted.height ||
      reference.frames() != distorted.frames()) {
    throw InvalidInput("segment_quality_psnr: reference and distorted clips differ in shape");
  }
  if (reference.width != grid.frame_width || reference.height != grid.frame_height ||
      reference.frames() != grid.frames) {
    throw InvalidInput("segment_quality_psnr: clip does not match the segment grid");
  }

  std::vector<double> psnr(static_cast<std::size_t>(grid.segment_count()));
  const auto w = static_cast<std::size_t>(grid.frame_width);
  for (int t = 0; t < grid.temporal_count; ++t) {
    for (int ty = 0; ty < grid.tiles_y; ++ty) {
      for (int tx = 0; tx < grid.tiles_x; ++tx) {
        std::uint64_t sse = 0;
        std::uint64_t count = 0;
        for (int f = grid.frame_begin(t); f < grid.frame_end(t); ++f) {
          const auto ref = reference.frame(f);
          const auto dis = distorted.frame(f);
          for (int y = ty * kTileHeight; y < (ty + 1) * kTileHeight; ++y) {
            const std::size_t row = static_cast<std::size_t>(y) * w;
            for (int x = tx * kTileWidth; x < (tx + 1) * kTileWidth; ++x) {
              const int d = int{ref[row + static_cast<std::size_t>(x)]} -
                            int{dis[row + static_cast<std::size_t>(x)]};
              sse += static_cast<std::uint64_t>(d * d);
            }
          }
          count += static_cast<std::uint64_t>(kTileWidth) * kTileHeight;
        }
        const double mse = static_cast<double>(sse) / static_cast<double>(count);
        const double value =
            mse == 0.0 ? kPsnrCap : std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
        const int id = (t * grid.tiles_y + ty) * grid.tiles_x + tx;
        psnr[static_cast<std::size_t>(id)] = value;
      }
    }
  }
  return psnr;
}

}  // namespace jndsur
