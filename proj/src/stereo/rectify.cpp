#include "stereotac/stereo/rectify.hpp"

#include <cmath>

namespace stereotac::stereo {

namespace {

// Rotation bringing the rig's left frame into the rectified frame: x along
// the baseline, z as close to the original optical axis as possible.
Eigen::Matrix3d baseline_frame(const StereoRig& rig) {
  // Right camera center expressed in the left frame.
  const Eigen::Vector3d c = -rig.rotation.transpose() * rig.translation_mm;
  Eigen::Vector3d e1 = c.normalized();
  if (e1.x() < 0.0) e1 = -e1;  // keep rectified +x pointing left -> right
  const Eigen::Vector3d z(0.0, 0.0, 1.0);
  Eigen::Vector3d e2 = z.cross(e1);
  const double n = e2.norm();
  if (n < 1e-12) throw Error("degenerate rig: baseline parallel to optical axis");
  e2 /= n;
  const Eigen::Vector3d e3 = e1.cross(e2);
  Eigen::Matrix3d r;
  r.row(0) = e1;
  r.row(1) = e2;
  r.row(2) = e3;
  return r;
}

}  // namespace

RectifiedGeometry make_rectification(const StereoRig& rig) {
  rig.left.validate();
  rig.right.validate();
  RectifiedGeometry g;
  g.r_left = baseline_frame(rig);
  g.r_right = g.r_left * rig.rotation.transpose();
  g.baseline_mm = rig.translation_mm.norm();
  g.f = 0.5 * (rig.left.fx + rig.left.fy);
  g.cx = 0.5 * (rig.left.cx + rig.right.cx);
  g.cy = 0.5 * (rig.left.cy + rig.right.cy);

  g.q.setZero();
  g.q(0, 0) = 1.0;
  g.q(0, 3) = -g.cx;
  g.q(1, 1) = 1.0;
  g.q(1, 3) = -g.cy;
  g.q(2, 3) = g.f;
  g.q(3, 2) = 1.0 / g.baseline_mm;
  return g;
}

Eigen::Vector2d rectify_point(const StereoRig& rig, const Eigen::Vector2d& px,
                              bool is_left) {
  const PinholeCamera& cam = is_left ? rig.left : rig.right;
  const Eigen::Matrix3d& rect = is_left ? rig.rect.r_left : rig.rect.r_right;
  const Eigen::Vector3d ray = rect * cam.unproject(px);
  if (ray.z() <= 0.0) throw Error("point rectifies behind the camera");
  return {rig.rect.f * ray.x() / ray.z() + rig.rect.cx,
          rig.rect.f * ray.y() / ray.z() + rig.rect.cy};
}

namespace {

Rgb8 sample_bilinear(const ImageRgb8& img, double x, double y) {
  // Absorb rounding wobble at the frame border before the range check.
  if (x < 0.0 && x > -1e-6) x = 0.0;
  if (y < 0.0 && y > -1e-6) y = 0.0;
  if (x > img.width() - 1.0 && x < img.width() - 1.0 + 1e-6) x = img.width() - 1.0;
  if (y > img.height() - 1.0 && y < img.height() - 1.0 + 1e-6) y = img.height() - 1.0;
  if (x < 0.0 || y < 0.0 || x > img.width() - 1.0 || y > img.height() - 1.0) {
    return {0, 0, 0};
  }
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0, fy = y - y0;
  const Rgb8 p00 = img.at(x0, y0), p10 = img.at(x1, y0);
  const Rgb8 p01 = img.at(x0, y1), p11 = img.at(x1, y1);
  auto mix = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    const double v = (1 - fy) * ((1 - fx) * a + fx * b) + fy * ((1 - fx) * c + fx * d);
    return static_cast<std::uint8_t>(std::lround(v));
  };
  return {mix(p00.r, p10.r, p01.r, p11.r), mix(p00.g, p10.g, p01.g, p11.g),
          mix(p00.b, p10.b, p01.b, p11.b)};
}

ImageRgb8 remap_one(const ImageRgb8& src, const PinholeCamera& cam,
                    const Eigen::Matrix3d& rect, const RectifiedGeometry& g) {
  ImageRgb8 out(src.width(), src.height());
  const Eigen::Matrix3d rect_inv = rect.transpose();
  for (int v = 0; v < out.height(); ++v) {
    for (int u = 0; u < out.width(); ++u) {
      // Rectified pixel -> ray -> original camera -> source pixel.
      const Eigen::Vector3d ray((u - g.cx) / g.f, (v - g.cy) / g.f, 1.0);
      const Eigen::Vector3d orig = rect_inv * ray;
      if (orig.z() <= 1e-9) continue;
      const Eigen::Vector2d src_px =
          cam.project(Eigen::Vector3d(orig.x(), orig.y(), orig.z()));
      out.at(u, v) = sample_bilinear(src, src_px.x(), src_px.y());
    }
  }
  return out;
}

}  // namespace

std::pair<ImageRgb8, ImageRgb8> rectify_pair(const ImageRgb8& left,
                                             const ImageRgb8& right,
                                             const StereoRig& rig) {
  if (left.width() != rig.left.width || left.height() != rig.left.height ||
      right.width() != rig.right.width || right.height() != rig.right.height) {
    throw Error("image size does not match the calibrated size");
  }
  return {remap_one(left, rig.left, rig.rect.r_left, rig.rect),
          remap_one(right, rig.right, rig.rect.r_right, rig.rect)};
}

}  // namespace stereotac::stereo
