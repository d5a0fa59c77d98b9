// Stereo calibration from checkerboard corner observations: closed-form
// homography-based initialization, then joint damped least squares over both
// cameras' intrinsics, distortion, the relative pose and all board poses.
#pragma once

#include <vector>

#include "stereotac/stereo/camera.hpp"

namespace stereotac::stereo {

struct BoardSpec {
  int corners_x = 8;  // inner corners per row
  int corners_y = 6;  // inner corner rows
  double pitch_mm = 17.0;

  int corner_count() const { return corners_x * corners_y; }
  /// Board-frame corner positions (Z = 0), row-major.
  std::vector<Eigen::Vector3d> object_points() const;
};

/// One synchronized view of the board; corner order matches object_points().
struct CornerObservations {
  std::vector<Eigen::Vector2d> left;
  std::vector<Eigen::Vector2d> right;
};

struct CalibrationResult {
  StereoRig rig;
  double rms_reprojection_px = 0.0;  // RMS over residual components
  std::vector<Eigen::Matrix3d> board_rotations;   // board -> left camera
  std::vector<Eigen::Vector3d> board_translations;
};

/// Needs >= 10 frames with diverse poses; throws "insufficient pose
/// diversity" otherwise.
CalibrationResult calibrate_stereo(const std::vector<CornerObservations>& frames,
                                   const BoardSpec& board, int image_width,
                                   int image_height);

/// Rodrigues axis-angle helpers shared by calibration and its tests.
Eigen::Matrix3d rodrigues_to_matrix(const Eigen::Vector3d& rvec);
Eigen::Vector3d matrix_to_rodrigues(const Eigen::Matrix3d& rot);

}  // namespace stereotac::stereo
