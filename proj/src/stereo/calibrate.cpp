#include "stereotac/stereo/calibrate.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "stereotac/stereo/rectify.hpp"

namespace stereotac::stereo {

std::vector<Eigen::Vector3d> BoardSpec::object_points() const {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(corner_count()));
  for (int r = 0; r < corners_y; ++r) {
    for (int c = 0; c < corners_x; ++c) {
      pts.emplace_back(c * pitch_mm, r * pitch_mm, 0.0);
    }
  }
  return pts;
}

Eigen::Matrix3d rodrigues_to_matrix(const Eigen::Vector3d& rvec) {
  const double theta = rvec.norm();
  if (theta < 1e-12) return Eigen::Matrix3d::Identity();
  const Eigen::Vector3d axis = rvec / theta;
  Eigen::Matrix3d k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(theta) * k +
         (1.0 - std::cos(theta)) * k * k;
}

Eigen::Vector3d matrix_to_rodrigues(const Eigen::Matrix3d& rot) {
  const double cos_theta = std::clamp((rot.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  if (theta < 1e-12) return Eigen::Vector3d::Zero();
  Eigen::Vector3d axis(rot(2, 1) - rot(1, 2), rot(0, 2) - rot(2, 0),
                       rot(1, 0) - rot(0, 1));
  const double s = axis.norm();
  if (s < 1e-12) {
    // theta near pi; recover the axis from the diagonal.
    Eigen::Vector3d a;
    for (int i = 0; i < 3; ++i) a[i] = std::sqrt(std::max(0.0, (rot(i, i) + 1.0) / 2.0));
    if (a.norm() < 1e-12) return Eigen::Vector3d::Zero();
    return theta * a.normalized();
  }
  return theta / s * axis;
}

namespace {

// Normalized DLT homography: board plane (X, Y) -> image pixels.
Eigen::Matrix3d fit_homography(const std::vector<Eigen::Vector3d>& object,
                               const std::vector<Eigen::Vector2d>& image) {
  const std::size_t n = object.size();
  Eigen::Vector2d mean_o = Eigen::Vector2d::Zero();
  Eigen::Vector2d mean_i = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mean_o += object[i].head<2>();
    mean_i += image[i];
  }
  mean_o /= static_cast<double>(n);
  mean_i /= static_cast<double>(n);
  double scale_o = 0.0, scale_i = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale_o += (object[i].head<2>() - mean_o).norm();
    scale_i += (image[i] - mean_i).norm();
  }
  scale_o = std::sqrt(2.0) * n / scale_o;
  scale_i = std::sqrt(2.0) * n / scale_i;

  Eigen::Matrix3d t_o = Eigen::Matrix3d::Identity();
  t_o(0, 0) = t_o(1, 1) = scale_o;
  t_o(0, 2) = -scale_o * mean_o.x();
  t_o(1, 2) = -scale_o * mean_o.y();
  Eigen::Matrix3d t_i = Eigen::Matrix3d::Identity();
  t_i(0, 0) = t_i(1, 1) = scale_i;
  t_i(0, 2) = -scale_i * mean_i.x();
  t_i(1, 2) = -scale_i * mean_i.y();

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d po = t_o * Eigen::Vector3d(object[i].x(), object[i].y(), 1.0);
    const Eigen::Vector3d pi = t_i * Eigen::Vector3d(image[i].x(), image[i].y(), 1.0);
    const double x = po.x(), y = po.y();
    const double u = pi.x(), v = pi.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Eigen::Matrix3d out = t_i.inverse() * hn * t_o;
  return out / out(2, 2);
}

// Closed-form intrinsics from plane homographies.
Eigen::Matrix3d intrinsics_from_homographies(const std::vector<Eigen::Matrix3d>& hs) {
  auto v_ij = [](const Eigen::Matrix3d& h, int i, int j) {
    Eigen::Matrix<double, 6, 1> v;
    v << h(0, i) * h(0, j), h(0, i) * h(1, j) + h(1, i) * h(0, j), h(1, i) * h(1, j),
        h(2, i) * h(0, j) + h(0, i) * h(2, j), h(2, i) * h(1, j) + h(1, i) * h(2, j),
        h(2, i) * h(2, j);
    return v;
  };
  Eigen::MatrixXd a(2 * hs.size(), 6);
  for (std::size_t f = 0; f < hs.size(); ++f) {
    a.row(2 * f) = v_ij(hs[f], 0, 1).transpose();
    a.row(2 * f + 1) = (v_ij(hs[f], 0, 0) - v_ij(hs[f], 1, 1)).transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  Eigen::Matrix<double, 6, 1> b = svd.matrixV().col(5);
  if (b(0) < 0.0) b = -b;

  const double denom = b(0) * b(2) - b(1) * b(1);
  if (denom <= 0.0 || b(0) <= 0.0) throw Error("insufficient pose diversity");
  const double v0 = (b(1) * b(3) - b(0) * b(4)) / denom;
  const double lambda = b(5) - (b(3) * b(3) + v0 * (b(1) * b(3) - b(0) * b(4))) / b(0);
  if (lambda / b(0) <= 0.0 || lambda / denom * b(0) <= 0.0) {
    throw Error("insufficient pose diversity");
  }
  const double alpha = std::sqrt(lambda / b(0));
  const double beta = std::sqrt(lambda * b(0) / denom);
  const double u0 = -b(3) * alpha * alpha / lambda;

  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = alpha;
  k(1, 1) = beta;
  k(0, 2) = u0;
  k(1, 2) = v0;
  return k;
}

struct Pose {
  Eigen::Matrix3d r;
  Eigen::Vector3d t;
};

Pose pose_from_homography(const Eigen::Matrix3d& h, const Eigen::Matrix3d& k) {
  const Eigen::Matrix3d kinv = k.inverse();
  const Eigen::Vector3d h1 = kinv * h.col(0);
  const Eigen::Vector3d h2 = kinv * h.col(1);
  const Eigen::Vector3d h3 = kinv * h.col(2);
  double scale = 1.0 / h1.norm();
  if (h3.z() * scale < 0.0) scale = -scale;  // board must sit in front
  Eigen::Matrix3d r;
  r.col(0) = scale * h1;
  r.col(1) = scale * h2;
  r.col(2) = r.col(0).cross(r.col(1));
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Pose pose;
  pose.r = svd.matrixU() * svd.matrixV().transpose();
  pose.t = scale * h3;
  return pose;
}

// Parameter block layout for the joint refinement.
//   [0..8]   left:  fx fy cx cy k1 k2 p1 p2 k3
//   [9..17]  right: same
//   [18..23] relative pose: rvec, tvec (X_r = R X_l + t)
//   [24 + 6i ...] board pose i in the left camera frame: rvec, tvec
struct Problem {
  const std::vector<CornerObservations>* frames;
  std::vector<Eigen::Vector3d> object;
  int image_width, image_height;
  bool optimize_distortion = true;

  std::size_t param_count() const { return 24 + 6 * frames->size(); }
  std::size_t residual_count() const {
    return 4 * object.size() * frames->size();
  }

  PinholeCamera camera(const Eigen::VectorXd& p, int base) const {
    PinholeCamera cam;
    cam.fx = p[base + 0];
    cam.fy = p[base + 1];
    cam.cx = p[base + 2];
    cam.cy = p[base + 3];
    cam.k1 = p[base + 4];
    cam.k2 = p[base + 5];
    cam.p1 = p[base + 6];
    cam.p2 = p[base + 7];
    cam.k3 = p[base + 8];
    cam.width = image_width;
    cam.height = image_height;
    return cam;
  }

  void residuals(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const PinholeCamera left = camera(p, 0);
    const PinholeCamera right = camera(p, 9);
    const Eigen::Matrix3d r_rel = rodrigues_to_matrix(p.segment<3>(18));
    const Eigen::Vector3d t_rel = p.segment<3>(21);
    r.resize(residual_count());
    std::size_t row = 0;
    for (std::size_t f = 0; f < frames->size(); ++f) {
      const Eigen::Matrix3d r_board = rodrigues_to_matrix(p.segment<3>(24 + 6 * f));
      const Eigen::Vector3d t_board = p.segment<3>(27 + 6 * f);
      const CornerObservations& obs = (*frames)[f];
      for (std::size_t j = 0; j < object.size(); ++j) {
        const Eigen::Vector3d in_left = r_board * object[j] + t_board;
        const Eigen::Vector3d in_right = r_rel * in_left + t_rel;
        const Eigen::Vector2d pl = left.project(in_left);
        const Eigen::Vector2d pr = right.project(in_right);
        r[row++] = pl.x() - obs.left[j].x();
        r[row++] = pl.y() - obs.left[j].y();
        r[row++] = pr.x() - obs.right[j].x();
        r[row++] = pr.y() - obs.right[j].y();
      }
    }
  }
};

// Damped least squares with numeric central-difference Jacobian.
double levenberg_marquardt(const Problem& problem, Eigen::VectorXd& params,
                           int max_iters) {
  const std::size_t n_params = problem.param_count();
  Eigen::VectorXd r;
  problem.residuals(params, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;

  // Distortion stays frozen in the first stage.
  std::vector<bool> active(n_params, true);
  if (!problem.optimize_distortion) {
    for (int c = 0; c < 2; ++c) {
      for (int i = 4; i < 9; ++i) active[9 * c + i] = false;
    }
  }

  Eigen::MatrixXd jac(r.size(), n_params);
  for (int iter = 0; iter < max_iters; ++iter) {
    for (std::size_t p = 0; p < n_params; ++p) {
      if (!active[p]) {
        jac.col(p).setZero();
        continue;
      }
      const double eps = 5e-6 * std::max(1.0, std::abs(params[p]));
      Eigen::VectorXd probe = params;
      probe[p] += eps;
      Eigen::VectorXd r_hi;
      problem.residuals(probe, r_hi);
      probe[p] = params[p] - eps;
      Eigen::VectorXd r_lo;
      problem.residuals(probe, r_lo);
      jac.col(p) = (r_hi - r_lo) / (2.0 * eps);
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-9);
      const Eigen::VectorXd delta = a.ldlt().solve(-jtr);
      Eigen::VectorXd candidate = params + delta;
      Eigen::VectorXd r_new;
      problem.residuals(candidate, r_new);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        params = candidate;
        r = r_new;
        const double rel_drop = (cost - cost_new) / std::max(cost, 1e-300);
        cost = cost_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (rel_drop < 1e-12) return cost;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  return cost;
}

}  // namespace

CalibrationResult calibrate_stereo(const std::vector<CornerObservations>& frames,
                                   const BoardSpec& board, int image_width,
                                   int image_height) {
  if (frames.size() < 10) throw Error("insufficient pose diversity: need >= 10 frames");
  const std::vector<Eigen::Vector3d> object = board.object_points();
  for (const CornerObservations& f : frames) {
    if (f.left.size() != object.size() || f.right.size() != object.size()) {
      throw Error("corner count does not match the board spec");
    }
  }

  // Closed-form initialization per camera.
  std::vector<Eigen::Matrix3d> h_left, h_right;
  for (const CornerObservations& f : frames) {
    h_left.push_back(fit_homography(object, f.left));
    h_right.push_back(fit_homography(object, f.right));
  }
  const Eigen::Matrix3d k_left = intrinsics_from_homographies(h_left);
  const Eigen::Matrix3d k_right = intrinsics_from_homographies(h_right);

  std::vector<Pose> poses_left, poses_right;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    poses_left.push_back(pose_from_homography(h_left[f], k_left));
    poses_right.push_back(pose_from_homography(h_right[f], k_right));
  }

  // Relative pose averaged over frames (angles are small between estimates).
  Eigen::Vector3d rvec_rel = Eigen::Vector3d::Zero();
  Eigen::Vector3d t_rel = Eigen::Vector3d::Zero();
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Eigen::Matrix3d r = poses_right[f].r * poses_left[f].r.transpose();
    rvec_rel += matrix_to_rodrigues(r);
    t_rel += poses_right[f].t - r * poses_left[f].t;
  }
  rvec_rel /= static_cast<double>(frames.size());
  t_rel /= static_cast<double>(frames.size());

  Problem problem;
  problem.frames = &frames;
  problem.object = object;
  problem.image_width = image_width;
  problem.image_height = image_height;

  Eigen::VectorXd params = Eigen::VectorXd::Zero(problem.param_count());
  params[0] = k_left(0, 0);
  params[1] = k_left(1, 1);
  params[2] = k_left(0, 2);
  params[3] = k_left(1, 2);
  params[9] = k_right(0, 0);
  params[10] = k_right(1, 1);
  params[11] = k_right(0, 2);
  params[12] = k_right(1, 2);
  params.segment<3>(18) = rvec_rel;
  params.segment<3>(21) = t_rel;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    params.segment<3>(24 + 6 * f) = matrix_to_rodrigues(poses_left[f].r);
    params.segment<3>(27 + 6 * f) = poses_left[f].t;
  }

  // Stage 1: pinhole-only refinement. Stage 2: full model.
  problem.optimize_distortion = false;
  levenberg_marquardt(problem, params, 30);
  problem.optimize_distortion = true;
  const double cost = levenberg_marquardt(problem, params, 80);

  CalibrationResult result;
  result.rig.left = problem.camera(params, 0);
  result.rig.right = problem.camera(params, 9);
  result.rig.rotation = rodrigues_to_matrix(params.segment<3>(18));
  result.rig.translation_mm = params.segment<3>(21);
  result.rig.validate();
  result.rig.rect = make_rectification(result.rig);
  result.rms_reprojection_px =
      std::sqrt(cost / static_cast<double>(problem.residual_count()));
  for (std::size_t f = 0; f < frames.size(); ++f) {
    result.board_rotations.push_back(rodrigues_to_matrix(params.segment<3>(24 + 6 * f)));
    result.board_translations.push_back(params.segment<3>(27 + 6 * f));
  }
  return result;
}

}  // namespace stereotac::stereo
