#pragma once

#include <array>
#include <string>
#include <string_view>

namespace jndsur {

/// Largest QP of the H.264 ladder; the JND search space is (anchor, kMaxQp].
inline constexpr int kMaxQp = 51;

/// Lower bound applied to every fitted or predicted standard deviation.
inline constexpr double kSigmaFloor = 1e-3;

enum class Resolution { k1080p, k720p, k540p, k360p };

inline constexpr std::array<Resolution, 4> kAllResolutions = {
    Resolution::k1080p, Resolution::k720p, Resolution::k540p, Resolution::k360p};

[[nodiscard]] std::string_view to_string(Resolution r) noexcept;

/// Parses "1080p", "720p", "540p" or "360p". Throws InvalidInput otherwise.
[[nodiscard]] Resolution parse_resolution(std::string_view text);

struct FrameSize {
  int width;
  int height;
};

[[nodiscard]] FrameSize frame_size(Resolution r) noexcept;

}  // namespace jndsur
