#include "stereotac/image.hpp"

#include <cmath>

namespace stereotac {

ImageRgb8::ImageRgb8(int width, int height, Rgb8 fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw Error("image dimensions must be >= 1");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

FloatMap::FloatMap(int width, int height, MapUnit unit, float fill)
    : width_(width), height_(height), unit_(unit) {
  if (width < 1 || height < 1) throw Error("map dimensions must be >= 1");
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

std::string to_string(MapUnit unit) {
  switch (unit) {
    case MapUnit::Millimeters: return "mm";
    case MapUnit::DimensionlessSlope: return "dimensionless-slope";
    case MapUnit::Radians: return "radians";
    case MapUnit::DisparityPx: return "disparity-px";
  }
  return "mm";
}

MapUnit map_unit_from_string(const std::string& s) {
  if (s == "mm") return MapUnit::Millimeters;
  if (s == "dimensionless-slope") return MapUnit::DimensionlessSlope;
  if (s == "radians") return MapUnit::Radians;
  if (s == "disparity-px") return MapUnit::DisparityPx;
  throw Error("unknown map unit tag: " + s);
}

std::uint64_t Rng::next_u64() {
  // splitmix64; small state, solid statistical quality for simulation noise.
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

double Rng::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

Rng Rng::fork(std::uint64_t salt) const {
  Rng child(state_ ^ (0xd1342543de82ef95ull * (salt + 1)));
  child.next_u64();
  return child;
}

}  // namespace stereotac
