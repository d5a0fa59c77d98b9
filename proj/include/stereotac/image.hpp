// Core raster and point-cloud containers shared by the whole pipeline.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stereotac {

/// Error type for every recoverable failure in the library. The message is
/// the contract: callers and tests match on its prefix.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

/// 8-bit RGB raster, row-major, origin top-left.
class ImageRgb8 {
 public:
  ImageRgb8() = default;
  ImageRgb8(int width, int height, Rgb8 fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  Rgb8& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const Rgb8& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::vector<Rgb8>& pixels() { return pixels_; }
  const std::vector<Rgb8>& pixels() const { return pixels_; }

  bool operator==(const ImageRgb8&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb8> pixels_;
};

/// Unit tag carried by every scalar map that crosses a file boundary.
enum class MapUnit { Millimeters, DimensionlessSlope, Radians, DisparityPx };

std::string to_string(MapUnit unit);
MapUnit map_unit_from_string(const std::string& s);

/// Scalar float raster. Invalid pixels, when the map has any, hold the
/// declared sentinel value (the sentinel is part of the file header).
class FloatMap {
 public:
  static constexpr float kDefaultSentinel = -1e30f;

  FloatMap() = default;
  FloatMap(int width, int height, MapUnit unit, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  MapUnit unit() const { return unit_; }
  void set_unit(MapUnit u) { unit_ = u; }

  float& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }

  std::vector<float>& values() { return values_; }
  const std::vector<float>& values() const { return values_; }

  const std::optional<float>& sentinel() const { return sentinel_; }
  void declare_sentinel(float s) { sentinel_ = s; }

  bool is_valid(int x, int y) const {
    return !sentinel_ || at(x, y) != *sentinel_;
  }

  bool operator==(const FloatMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  MapUnit unit_ = MapUnit::Millimeters;
  std::optional<float> sentinel_;
  std::vector<float> values_;
};

struct Point3 {
  double x = 0, y = 0, z = 0;
};

/// 3D points in millimeters, optional per-point color.
struct PointCloud3 {
  std::vector<Point3> points;
  std::vector<Rgb8> colors;  // empty or same size as points

  bool has_colors() const { return !colors.empty(); }
  std::size_t size() const { return points.size(); }
};

/// Deterministic RNG wrapper. Draws are defined by this class, not by the
/// standard library's distribution objects, so streams are identical across
/// toolchains for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  int uniform_int(int lo, int hi);  // inclusive bounds
  /// Standard normal via Box-Muller; always consumes two uniforms.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Derive an independent stream, e.g. one per frame or sweep cell.
  Rng fork(std::uint64_t salt) const;

 private:
  std::uint64_t state_;
};

}  // namespace stereotac
