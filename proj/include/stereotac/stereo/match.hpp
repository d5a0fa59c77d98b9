// Dense SAD block matching over rectified pairs with parabolic subpixel
// refinement, uniqueness and texture validation.
#pragma once

#include "stereotac/stereo/camera.hpp"

namespace stereotac::stereo {

struct BlockMatchSettings {
  int window = 11;  // odd SAD window side
  int min_disparity = 0;
  int max_disparity = 128;
  double uniqueness_ratio = 1.15;  // second-best SAD must exceed best * ratio
  int texture_threshold = 300;     // min sum |dI/dx| over the window

  void validate() const;
};

struct DisparityMap {
  FloatMap map;  // disparity-px, invalid pixels at the declared sentinel
  BlockMatchSettings settings;
};

/// Left-referenced disparity: the pixel at (x, y) in the left image matches
/// (x - d, y) in the right image.
DisparityMap block_match(const ImageRgb8& left, const ImageRgb8& right,
                         const BlockMatchSettings& settings = {});

std::vector<std::uint8_t> to_grayscale(const ImageRgb8& image);

}  // namespace stereotac::stereo
