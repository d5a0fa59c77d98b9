// Epipolar rectification: derives the row-aligned virtual camera pair from a
// calibrated rig and remaps images into it.
#pragma once

#include <utility>

#include "stereotac/stereo/camera.hpp"

namespace stereotac::stereo {

/// Splits the relative rotation between the cameras and aligns the rectified
/// x-axis with the baseline. For an already-aligned distortion-free rig the
/// result is the identity mapping.
RectifiedGeometry make_rectification(const StereoRig& rig);

/// Remaps a raw pair into the rectified frames (bilinear sampling).
std::pair<ImageRgb8, ImageRgb8> rectify_pair(const ImageRgb8& left,
                                             const ImageRgb8& right,
                                             const StereoRig& rig);

/// Maps a raw-image point into the rectified frame (left: is_left = true).
/// Exposed for geometric checks; the image path uses the inverse mapping.
Eigen::Vector2d rectify_point(const StereoRig& rig, const Eigen::Vector2d& px,
                              bool is_left);

}  // namespace stereotac::stereo
