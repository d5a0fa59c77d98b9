// Pinhole camera model with Brown distortion and the calibrated stereo rig,
// including the derived rectification geometry and reprojection matrix.
#pragma once

#include <Eigen/Dense>
#include <filesystem>

#include "stereotac/image.hpp"

namespace stereotac::stereo {

struct PinholeCamera {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  double k1 = 0, k2 = 0, k3 = 0;
  double p1 = 0, p2 = 0;
  int width = 0, height = 0;

  /// Projects a camera-frame point (Z > 0) to pixel coordinates, applying
  /// the distortion model.
  Eigen::Vector2d project(const Eigen::Vector3d& pt) const;

  /// Normalized ray (x, y, 1) for a pixel; inverts distortion iteratively.
  Eigen::Vector3d unproject(const Eigen::Vector2d& px) const;

  /// Distorts normalized coordinates (x, y) -> (xd, yd).
  Eigen::Vector2d distort(const Eigen::Vector2d& n) const;

  void validate() const;
  bool has_distortion() const { return k1 || k2 || k3 || p1 || p2; }
};

/// Row-aligned virtual camera pair derived from a rig.
struct RectifiedGeometry {
  Eigen::Matrix3d r_left = Eigen::Matrix3d::Identity();   // original -> rectified
  Eigen::Matrix3d r_right = Eigen::Matrix3d::Identity();
  double f = 0;            // shared rectified focal length, px
  double cx = 0, cy = 0;   // shared rectified principal point
  double baseline_mm = 0;  // positive camera separation
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();  // (x, y, d, 1) -> homogeneous 3D
};

/// Calibrated pair: X_right = rotation * X_left + translation.
struct StereoRig {
  PinholeCamera left, right;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_mm = Eigen::Vector3d(-14.0, 0.0, 0.0);
  RectifiedGeometry rect;

  double baseline_mm() const { return translation_mm.norm(); }
  void validate() const;

  /// Aligned distortion-free rig matching the physical layout: f = 800 px,
  /// 14 mm baseline, 640x480 frames. Rectification is the identity.
  static StereoRig canonical(int width = 640, int height = 480, double f = 800.0,
                             double baseline_mm = 14.0);
};

void save_rig(const StereoRig& rig, const std::filesystem::path& path);
StereoRig load_rig(const std::filesystem::path& path);

}  // namespace stereotac::stereo
