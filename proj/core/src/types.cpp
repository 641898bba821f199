#include "jndsur/types.hpp"

#include <string>

#include "jndsur/error.hpp"

namespace jndsur {

std::string_view to_string(Resolution r) noexcept {
  switch (r) {
    case Resolution::k1080p: return "1080p";
    case Resolution::k720p: return "720p";
    case Resolution::k540p: return "540p";
    case Resolution::k360p: return "360p";
  }
  return "?";
}

Resolution parse_resolution(std::string_view text) {
  for (Resolution r : kAllResolutions) {
    if (to_string(r) == text) return r;
  }
  throw InvalidInput("unknown resolution '" + std::string(text) + "'");
}

FrameSize frame_size(Resolution r) noexcept {
  switch (r) {
    case Resolution::k1080p: return {1920, 1080};
    case Resolution::k720p: return {1280, 720};
    case Resolution::k540p: return {960, 540};
    case Resolution::k360p: return {640, 360};
  }
  return {0, 0};
}

}  // namespace jndsur
