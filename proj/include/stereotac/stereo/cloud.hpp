// Disparity-to-3D reprojection through the rig's Q matrix and statistical
// outlier removal on the resulting cloud.
#pragma once

#include "stereotac/stereo/match.hpp"

namespace stereotac::stereo {

struct ReprojectStats {
  std::size_t valid_points = 0;
  std::size_t skipped_nonpositive = 0;  // d <= 0 pixels
};

/// Maps every valid disparity pixel through Q to (X, Y, Z) in mm. Colors,
/// when a rectified left image is supplied, ride along per point.
PointCloud3 reproject(const DisparityMap& disparity, const StereoRig& rig,
                      const ImageRgb8* left_rectified = nullptr,
                      ReprojectStats* stats = nullptr);

/// Per-pixel Z in mm (sentinel where the disparity is invalid).
FloatMap disparity_to_depth(const DisparityMap& disparity, const StereoRig& rig);

/// Removes points whose mean distance to their k nearest neighbors exceeds
/// global mean + std_ratio * std. Never removes more than half the cloud.
PointCloud3 remove_outliers(const PointCloud3& cloud, int k_neighbors = 20,
                            double std_ratio = 2.0);

}  // namespace stereotac::stereo
