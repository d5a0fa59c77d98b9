#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "stereotac/image.hpp"
#include "stereotac/image_io.hpp"

using namespace stereotac;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "stereotac_io_tests";
  fs::create_directories(dir);
  return dir;
}

void write_raw(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

TEST_SUITE("image_io") {

TEST_CASE("ppm round-trips a 2x1 image exactly") {
  ImageRgb8 img(2, 1);
  img.at(0, 0) = {255, 0, 0};
  img.at(1, 0) = {0, 0, 255};
  const fs::path p = temp_dir() / "tiny.ppm";
  io::write_image(img, p);
  CHECK(io::read_image(p) == img);
}

TEST_CASE("ppm rejects bad magic, bad maxval, truncation") {
  const fs::path dir = temp_dir();
  write_raw(dir / "p5.ppm", "P5\n2 1\n255\n????");
  CHECK_THROWS_WITH_AS(io::read_image(dir / "p5.ppm"),
                       doctest::Contains("unsupported magic"), Error);

  write_raw(dir / "max.ppm", "P6\n2 1\n65535\n" + std::string(12, 'x'));
  CHECK_THROWS_WITH_AS(io::read_image(dir / "max.ppm"),
                       doctest::Contains("unsupported maxval"), Error);

  write_raw(dir / "trunc.ppm", "P6\n4 4\n255\nabc");
  CHECK_THROWS_WITH_AS(io::read_image(dir / "trunc.ppm"),
                       doctest::Contains("truncated"), Error);

  write_raw(dir / "hdr.ppm", "P6\n-3 1\n255\n");
  CHECK_THROWS_AS(io::read_image(dir / "hdr.ppm"), Error);
}

TEST_CASE("ppm round-trips a full-size frame with identical checksum") {
  ImageRgb8 img(640, 480);
  Rng rng(20240101);
  for (auto& px : img.pixels()) {
    px = {static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
          static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
          static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
  }
  const fs::path p = temp_dir() / "frame.ppm";
  io::write_image(img, p);
  const ImageRgb8 back = io::read_image(p);
  CHECK(fnv1a(back.pixels().data(), back.pixel_count() * 3) ==
        fnv1a(img.pixels().data(), img.pixel_count() * 3));
}

TEST_CASE("pfm round-trips values, unit tag and sentinel") {
  FloatMap map(3, 2, MapUnit::DimensionlessSlope);
  map.at(0, 0) = 0.0f;
  map.at(1, 0) = -1.5f;
  map.at(2, 0) = 3.25e-3f;
  map.at(0, 1) = 42.0f;
  map.declare_sentinel(FloatMap::kDefaultSentinel);
  map.at(1, 1) = FloatMap::kDefaultSentinel;
  const fs::path p = temp_dir() / "map.pfm";
  io::write_floatmap(map, p);
  const FloatMap back = io::read_floatmap(p);
  CHECK(back == map);
  CHECK_FALSE(back.is_valid(1, 1));
  CHECK(back.is_valid(0, 0));
}

TEST_CASE("pfm 1x1 round-trip") {
  FloatMap map(1, 1, MapUnit::Millimeters);
  map.at(0, 0) = 0.0f;
  const fs::path p = temp_dir() / "one.pfm";
  io::write_floatmap(map, p);
  CHECK(io::read_floatmap(p) == map);
}

TEST_CASE("pfm rejects non-finite payloads and truncation") {
  const fs::path dir = temp_dir();
  FloatMap map(2, 1, MapUnit::Millimeters);
  map.at(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_WITH_AS(io::write_floatmap(map, dir / "nan.pfm"),
                       doctest::Contains("non-finite"), Error);

  std::string body = "Pf\n2 1\n-1.0 # unit=mm\n";
  const float vals[2] = {1.0f, std::numeric_limits<float>::quiet_NaN()};
  body.append(reinterpret_cast<const char*>(vals), sizeof(vals));
  write_raw(dir / "nan2.pfm", body);
  CHECK_THROWS_WITH_AS(io::read_floatmap(dir / "nan2.pfm"),
                       doctest::Contains("without sentinel declaration"), Error);

  write_raw(dir / "short.pfm", "Pf\n8 8\n-1.0 # unit=mm\nxy");
  CHECK_THROWS_WITH_AS(io::read_floatmap(dir / "short.pfm"),
                       doctest::Contains("truncated"), Error);
}

TEST_CASE("ply writes one vertex per point") {
  PointCloud3 cloud;
  cloud.points.push_back({0.0, 0.0, 100.0});
  const fs::path p = temp_dir() / "single.ply";
  io::write_pointcloud(cloud, p);
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("element vertex 1") != std::string::npos);
  CHECK(text.find("0 0 100") != std::string::npos);
}

TEST_CASE("ply preserves coordinates to 6 significant digits") {
  PointCloud3 cloud;
  cloud.points.push_back({1.23456789, 0.0, 0.0});
  cloud.points.push_back({0.0, -2.3456789, 0.0});
  cloud.points.push_back({0.0, 0.0, 345.678912});
  const fs::path p = temp_dir() / "triad.ply";
  io::write_pointcloud(cloud, p);
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line) && line != "end_header") {
  }
  double x, y, z;
  in >> x >> y >> z;
  CHECK(x == doctest::Approx(1.23456789).epsilon(1e-6));
  in >> x >> y >> z;
  CHECK(y == doctest::Approx(-2.3456789).epsilon(1e-6));
  in >> x >> y >> z;
  CHECK(z == doctest::Approx(345.678912).epsilon(1e-6));
}

TEST_CASE("ply rejects an empty cloud") {
  PointCloud3 cloud;
  CHECK_THROWS_WITH_AS(io::write_pointcloud(cloud, temp_dir() / "none.ply"),
                       doctest::Contains("nothing to write"), Error);
}

}  // TEST_SUITE
