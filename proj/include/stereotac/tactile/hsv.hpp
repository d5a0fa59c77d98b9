// HSV color filtering that isolates the LED tones in tactile frames and
// rejects external-light contamination.
#pragma once

#include <cstdint>
#include <vector>

#include "stereotac/image.hpp"

namespace stereotac::tactile {

struct Hsv {
  double h;  // degrees, [0, 360)
  double s;  // [0, 1]
  double v;  // [0, 1]
};

Hsv rgb_to_hsv(const Rgb8& c);

/// Hue windows for the LED red/blue tones. A red/blue LED mixture lands
/// anywhere in [240, 360) degrees, so the red window reaches down to the
/// magenta midpoint; white or green contamination fails the saturation or hue
/// test instead.
struct HsvFilterSpec {
  double red_lo1 = 0.0, red_hi1 = 20.0;
  double red_lo2 = 300.0, red_hi2 = 360.0;
  double blue_lo = 200.0, blue_hi = 300.0;
  double min_saturation = 0.35;
  double min_value = 0.2;

  void validate() const;
  bool passes(const Hsv& c) const;
};

/// 1 where the pixel's hue lies in the red or blue window and saturation /
/// value clear their thresholds, else 0.
std::vector<std::uint8_t> hsv_mask(const ImageRgb8& frame, const HsvFilterSpec& spec);

}  // namespace stereotac::tactile
