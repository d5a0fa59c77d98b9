#include "stereotac/stereo/camera.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "stereotac/image_io.hpp"
#include "stereotac/stereo/rectify.hpp"

namespace stereotac::stereo {

using ordered_json = nlohmann::ordered_json;

Eigen::Vector2d PinholeCamera::distort(const Eigen::Vector2d& n) const {
  const double x = n.x(), y = n.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3));
  const double xd = x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x);
  const double yd = y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y;
  return {xd, yd};
}

Eigen::Vector2d PinholeCamera::project(const Eigen::Vector3d& pt) const {
  const Eigen::Vector2d n(pt.x() / pt.z(), pt.y() / pt.z());
  const Eigen::Vector2d d = distort(n);
  return {fx * d.x() + cx, fy * d.y() + cy};
}

Eigen::Vector3d PinholeCamera::unproject(const Eigen::Vector2d& px) const {
  const Eigen::Vector2d target((px.x() - cx) / fx, (px.y() - cy) / fy);
  Eigen::Vector2d n = target;
  if (has_distortion()) {
    // Fixed-point iteration; converges quickly for moderate lens distortion.
    for (int it = 0; it < 20; ++it) {
      const Eigen::Vector2d d = distort(n);
      const Eigen::Vector2d err = d - target;
      n -= err;
      if (err.squaredNorm() < 1e-24) break;
    }
  }
  return {n.x(), n.y(), 1.0};
}

void PinholeCamera::validate() const {
  if (fx <= 0.0 || fy <= 0.0) throw Error("camera focal lengths must be > 0");
  if (width < 1 || height < 1) throw Error("camera image size must be >= 1");
  if (cx < 0 || cx >= width || cy < 0 || cy >= height) {
    throw Error("camera principal point must lie inside the image");
  }
}

void StereoRig::validate() const {
  left.validate();
  right.validate();
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).norm() >= 1e-9) {
    throw Error("rig rotation is not orthonormal");
  }
  if (translation_mm.norm() <= 0.0) throw Error("rig baseline must be > 0");
}

StereoRig StereoRig::canonical(int width, int height, double f, double baseline_mm) {
  StereoRig rig;
  rig.left.fx = rig.left.fy = f;
  rig.left.cx = width / 2.0;
  rig.left.cy = height / 2.0;
  rig.left.width = width;
  rig.left.height = height;
  rig.right = rig.left;
  rig.rotation = Eigen::Matrix3d::Identity();
  rig.translation_mm = Eigen::Vector3d(-baseline_mm, 0.0, 0.0);
  rig.rect = make_rectification(rig);
  return rig;
}

namespace {

ordered_json camera_json(const PinholeCamera& c) {
  return ordered_json{{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy},
                      {"k1", c.k1}, {"k2", c.k2}, {"k3", c.k3}, {"p1", c.p1},
                      {"p2", c.p2}, {"width", c.width}, {"height", c.height}};
}

PinholeCamera camera_from_json(const ordered_json& j) {
  PinholeCamera c;
  c.fx = j.at("fx");
  c.fy = j.at("fy");
  c.cx = j.at("cx");
  c.cy = j.at("cy");
  c.k1 = j.value("k1", 0.0);
  c.k2 = j.value("k2", 0.0);
  c.k3 = j.value("k3", 0.0);
  c.p1 = j.value("p1", 0.0);
  c.p2 = j.value("p2", 0.0);
  c.width = j.at("width");
  c.height = j.at("height");
  return c;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) rows.push_back(m(r, c));
  }
  return rows;
}

void matrix_from_json(const ordered_json& j, Eigen::Ref<Eigen::MatrixXd> m) {
  if (static_cast<int>(j.size()) != m.rows() * m.cols()) {
    throw Error("rig matrix has wrong element count");
  }
  int i = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = j.at(i++).get<double>();
  }
}

}  // namespace

void save_rig(const StereoRig& rig, const std::filesystem::path& path) {
  ordered_json j;
  j["left"] = camera_json(rig.left);
  j["right"] = camera_json(rig.right);
  j["rotation"] = matrix_json(rig.rotation);
  j["translation_mm"] = matrix_json(rig.translation_mm);
  j["rectified"] = ordered_json{{"r_left", matrix_json(rig.rect.r_left)},
                                {"r_right", matrix_json(rig.rect.r_right)},
                                {"f", rig.rect.f},
                                {"cx", rig.rect.cx},
                                {"cy", rig.rect.cy},
                                {"baseline_mm", rig.rect.baseline_mm},
                                {"q", matrix_json(rig.rect.q)}};
  io::atomic_write_bytes(path, j.dump(2) + "\n");
}

StereoRig load_rig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rig file: " + path.string());
  ordered_json j = ordered_json::parse(in, nullptr, true);
  StereoRig rig;
  rig.left = camera_from_json(j.at("left"));
  rig.right = camera_from_json(j.at("right"));
  Eigen::MatrixXd rot(3, 3), t(3, 1);
  matrix_from_json(j.at("rotation"), rot);
  matrix_from_json(j.at("translation_mm"), t);
  rig.rotation = rot;
  rig.translation_mm = t;
  if (j.contains("rectified")) {
    const auto& r = j.at("rectified");
    Eigen::MatrixXd rl(3, 3), rr(3, 3), q(4, 4);
    matrix_from_json(r.at("r_left"), rl);
    matrix_from_json(r.at("r_right"), rr);
    matrix_from_json(r.at("q"), q);
    rig.rect.r_left = rl;
    rig.rect.r_right = rr;
    rig.rect.q = q;
    rig.rect.f = r.at("f");
    rig.rect.cx = r.at("cx");
    rig.rect.cy = r.at("cy");
    rig.rect.baseline_mm = r.at("baseline_mm");
  } else {
    rig.rect = make_rectification(rig);
  }
  rig.validate();
  return rig;
}

}  // namespace stereotac::stereo
