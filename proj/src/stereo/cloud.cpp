#include "stereotac/stereo/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace stereotac::stereo {

PointCloud3 reproject(const DisparityMap& disparity, const StereoRig& rig,
                      const ImageRgb8* left_rectified, ReprojectStats* stats) {
  const FloatMap& map = disparity.map;
  const Eigen::Matrix4d& q = rig.rect.q;
  PointCloud3 cloud;
  ReprojectStats local;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.is_valid(x, y)) continue;
      const double d = map.at(x, y);
      if (d <= 0.0) {
        ++local.skipped_nonpositive;
        continue;
      }
      const Eigen::Vector4d p = q * Eigen::Vector4d(x, y, d, 1.0);
      if (p.w() == 0.0) continue;
      cloud.points.push_back({p.x() / p.w(), p.y() / p.w(), p.z() / p.w()});
      if (left_rectified) cloud.colors.push_back(left_rectified->at(x, y));
      ++local.valid_points;
    }
  }
  if (stats) *stats = local;
  return cloud;
}

FloatMap disparity_to_depth(const DisparityMap& disparity, const StereoRig& rig) {
  const FloatMap& map = disparity.map;
  FloatMap depth(map.width(), map.height(), MapUnit::Millimeters,
                 FloatMap::kDefaultSentinel);
  depth.declare_sentinel(FloatMap::kDefaultSentinel);
  const Eigen::Matrix4d& q = rig.rect.q;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.is_valid(x, y)) continue;
      const double d = map.at(x, y);
      if (d <= 0.0) continue;
      const Eigen::Vector4d p = q * Eigen::Vector4d(x, y, d, 1.0);
      if (p.w() == 0.0) continue;
      depth.at(x, y) = static_cast<float>(p.z() / p.w());
    }
  }
  return depth;
}

namespace {

// Minimal 3D kd-tree for k-nearest-neighbor mean distances.
class KdTree {
 public:
  explicit KdTree(const std::vector<Point3>& pts) : pts_(pts) {
    index_.resize(pts.size());
    std::iota(index_.begin(), index_.end(), 0u);
    build(0, static_cast<int>(index_.size()), 0);
  }

  // Mean distance from pts_[query] to its k nearest neighbors (self excluded).
  double knn_mean_distance(std::size_t query, int k) const {
    std::priority_queue<double> heap;  // largest of the k best on top
    search(0, static_cast<int>(index_.size()), 0, query, k, heap);
    double sum = 0.0;
    std::size_t n = heap.size();
    while (!heap.empty()) {
      sum += std::sqrt(heap.top());
      heap.pop();
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
  }

 private:
  static double coord(const Point3& p, int axis) {
    return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
  }

  void build(int lo, int hi, int axis) {
    if (hi - lo <= 1) return;
    const int mid = (lo + hi) / 2;
    std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return coord(pts_[a], axis) < coord(pts_[b], axis);
                     });
    build(lo, mid, (axis + 1) % 3);
    build(mid + 1, hi, (axis + 1) % 3);
  }

  void search(int lo, int hi, int axis, std::size_t query, int k,
              std::priority_queue<double>& heap) const {
    if (hi <= lo) return;
    const int mid = (lo + hi) / 2;
    const std::uint32_t node = index_[mid];
    if (node != query) {
      const double dx = pts_[node].x - pts_[query].x;
      const double dy = pts_[node].y - pts_[query].y;
      const double dz = pts_[node].z - pts_[query].z;
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (static_cast<int>(heap.size()) < k) {
        heap.push(d2);
      } else if (d2 < heap.top()) {
        heap.pop();
        heap.push(d2);
      }
    }
    const double delta = coord(pts_[query], axis) - coord(pts_[node], axis);
    const int next_axis = (axis + 1) % 3;
    const bool left_first = delta < 0.0;
    if (left_first) {
      search(lo, mid, next_axis, query, k, heap);
    } else {
      search(mid + 1, hi, next_axis, query, k, heap);
    }
    if (static_cast<int>(heap.size()) < k || delta * delta < heap.top()) {
      if (left_first) {
        search(mid + 1, hi, next_axis, query, k, heap);
      } else {
        search(lo, mid, next_axis, query, k, heap);
      }
    }
  }

  const std::vector<Point3>& pts_;
  std::vector<std::uint32_t> index_;
};

}  // namespace

PointCloud3 remove_outliers(const PointCloud3& cloud, int k_neighbors,
                            double std_ratio) {
  const std::size_t n = cloud.size();
  if (n <= static_cast<std::size_t>(k_neighbors)) {
    throw Error("cloud too small for outlier removal");
  }

  const KdTree tree(cloud.points);
  std::vector<double> mean_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    mean_dist[i] = tree.knn_mean_distance(i, k_neighbors);
  }
  double mean = 0.0;
  for (double d : mean_dist) mean += d;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double d : mean_dist) var += (d - mean) * (d - mean);
  const double stddev = std::sqrt(var / static_cast<double>(n));
  // Relative slack keeps degenerate spreads (all distances equal up to
  // rounding) from cutting on floating-point noise.
  double threshold = mean + std_ratio * stddev + 1e-9 * mean;

  std::size_t kept = 0;
  for (double d : mean_dist) kept += d <= threshold ? 1 : 0;
  if (kept < (n + 1) / 2) {
    // Guard: keep the better half ranked by neighbor distance.
    std::vector<double> sorted = mean_dist;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    threshold = sorted[n / 2];
  }

  PointCloud3 out;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mean_dist[i] > threshold) continue;
    out.points.push_back(cloud.points[i]);
    if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
  }
  return out;
}

}  // namespace stereotac::stereo
