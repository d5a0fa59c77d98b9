#include "stereotac/tactile/hsv.hpp"

#include <algorithm>

namespace stereotac::tactile {

Hsv rgb_to_hsv(const Rgb8& c) {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out{0.0, 0.0, mx};
  if (mx > 0.0) out.s = delta / mx;
  if (delta > 0.0) {
    if (mx == r) {
      out.h = 60.0 * ((g - b) / delta);
    } else if (mx == g) {
      out.h = 60.0 * (2.0 + (b - r) / delta);
    } else {
      out.h = 60.0 * (4.0 + (r - g) / delta);
    }
    if (out.h < 0.0) out.h += 360.0;
  }
  return out;
}

void HsvFilterSpec::validate() const {
  if (red_hi1 < red_lo1 || red_hi2 < red_lo2 || blue_hi < blue_lo) {
    throw Error("hsv filter: hue windows must be non-empty");
  }
  if (min_saturation < 0.0 || min_saturation > 1.0 || min_value < 0.0 || min_value > 1.0) {
    throw Error("hsv filter: thresholds must be in [0,1]");
  }
}

bool HsvFilterSpec::passes(const Hsv& c) const {
  if (c.s < min_saturation || c.v < min_value) return false;
  const bool red = (c.h >= red_lo1 && c.h <= red_hi1) || (c.h >= red_lo2 && c.h <= red_hi2);
  const bool blue = c.h >= blue_lo && c.h < blue_hi;
  return red || blue;
}

std::vector<std::uint8_t> hsv_mask(const ImageRgb8& frame, const HsvFilterSpec& spec) {
  spec.validate();
  std::vector<std::uint8_t> mask(frame.pixel_count(), 0);
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    mask[i] = spec.passes(rgb_to_hsv(frame.pixels()[i])) ? 1 : 0;
  }
  return mask;
}

}  // namespace stereotac::tactile
