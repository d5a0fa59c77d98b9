#include "stereotac/image_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace stereotac::io {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Skips whitespace and '#' comments, then parses one unsigned decimal token.
// Netpbm-style header scanning shared by the PPM reader.
bool next_header_uint(const std::string& data, std::size_t& pos, long& out) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos]))) {
    return false;
  }
  long v = 0;
  while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
    v = v * 10 + (data[pos] - '0');
    if (v > 1'000'000'000L) return false;
    ++pos;
  }
  out = v;
  return true;
}

static_assert(std::endian::native == std::endian::little,
              "file payloads are little-endian; big-endian hosts need swaps");

}  // namespace

void atomic_write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ImageRgb8 read_image(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.size() < 2 || data[0] != 'P' || data[1] != '6') {
    throw Error("unsupported magic (expected P6): " + path.string());
  }
  std::size_t pos = 2;
  long w = 0, h = 0, maxval = 0;
  if (!next_header_uint(data, pos, w) || !next_header_uint(data, pos, h) ||
      !next_header_uint(data, pos, maxval)) {
    throw Error("malformed PPM header: " + path.string());
  }
  if (w < 1 || h < 1) throw Error("malformed PPM header: " + path.string());
  if (maxval != 255) throw Error("unsupported maxval (expected 255): " + path.string());
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
    throw Error("malformed PPM header: " + path.string());
  }
  ++pos;  // single whitespace byte before the payload
  const std::size_t payload = static_cast<std::size_t>(w) * h * 3;
  if (data.size() - pos < payload) {
    throw Error("truncated PPM payload: " + path.string());
  }
  ImageRgb8 image(static_cast<int>(w), static_cast<int>(h));
  std::memcpy(image.pixels().data(), data.data() + pos, payload);
  return image;
}

void write_image(const ImageRgb8& image, const std::filesystem::path& path) {
  if (image.width() < 1 || image.height() < 1) throw Error("empty image");
  std::string out;
  out.reserve(32 + image.pixel_count() * 3);
  out += "P6\n";
  out += std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n";
  out += "255\n";
  out.append(reinterpret_cast<const char*>(image.pixels().data()),
             image.pixel_count() * 3);
  atomic_write_bytes(path, out);
}

FloatMap read_floatmap(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::istringstream header(data.substr(0, std::min<std::size_t>(data.size(), 256)));
  std::string magic;
  header >> magic;
  if (magic != "Pf") throw Error("unsupported magic (expected Pf): " + path.string());
  long w = 0, h = 0;
  header >> w >> h;
  if (!header || w < 1 || h < 1) throw Error("malformed PFM header: " + path.string());

  // Scale line: "<scale> # unit=<tag> [sentinel=<value>]".
  // Negative scale marks little-endian payload, per PFM convention.
  double scale = 0.0;
  header >> scale;
  if (!header || scale >= 0.0) {
    throw Error("malformed PFM scale (expected negative, little-endian): " + path.string());
  }
  MapUnit unit = MapUnit::Millimeters;
  std::optional<float> sentinel;
  {
    std::string rest;
    std::getline(header, rest);
    std::istringstream tags(rest);
    std::string tok;
    bool saw_comment = false;
    while (tags >> tok) {
      if (tok == "#") {
        saw_comment = true;
        continue;
      }
      if (tok.rfind("unit=", 0) == 0) {
        unit = map_unit_from_string(tok.substr(5));
      } else if (tok.rfind("sentinel=", 0) == 0) {
        sentinel = std::stof(tok.substr(9));
      }
    }
    (void)saw_comment;
  }

  // Payload starts right after the scale line's newline.
  const std::size_t nl = data.find('\n', data.find('\n', data.find('\n') + 1) + 1);
  if (nl == std::string::npos) throw Error("malformed PFM header: " + path.string());
  const std::size_t pos = nl + 1;
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (data.size() - pos < count * sizeof(float)) {
    throw Error("truncated PFM payload: " + path.string());
  }

  FloatMap map(static_cast<int>(w), static_cast<int>(h), unit);
  if (sentinel) map.declare_sentinel(*sentinel);
  // PFM stores rows bottom-to-top.
  for (long row = 0; row < h; ++row) {
    const long src_row = h - 1 - row;
    std::memcpy(map.values().data() + static_cast<std::size_t>(row) * w,
                data.data() + pos + static_cast<std::size_t>(src_row) * w * sizeof(float),
                static_cast<std::size_t>(w) * sizeof(float));
  }
  for (std::size_t i = 0; i < count; ++i) {
    const float v = map.values()[i];
    if (!std::isfinite(v)) {
      throw Error("non-finite value without sentinel declaration: " + path.string());
    }
  }
  return map;
}

void write_floatmap(const FloatMap& map, const std::filesystem::path& path) {
  if (map.width() < 1 || map.height() < 1) throw Error("empty map");
  for (const float v : map.values()) {
    if (!std::isfinite(v)) throw Error("non-finite value in map payload");
  }
  std::string out;
  out.reserve(64 + map.values().size() * sizeof(float));
  out += "Pf\n";
  out += std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  out += "-1.0 # unit=" + to_string(map.unit());
  if (map.sentinel()) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), " sentinel=%.9g", *map.sentinel());
    out += buf;
  }
  out += "\n";
  for (int row = map.height() - 1; row >= 0; --row) {
    out.append(reinterpret_cast<const char*>(
                   map.values().data() + static_cast<std::size_t>(row) * map.width()),
               static_cast<std::size_t>(map.width()) * sizeof(float));
  }
  atomic_write_bytes(path, out);
}

void write_pointcloud(const PointCloud3& cloud, const std::filesystem::path& path) {
  if (cloud.points.empty()) throw Error("nothing to write: empty point cloud");
  if (cloud.has_colors() && cloud.colors.size() != cloud.points.size()) {
    throw Error("color count does not match point count");
  }
  std::string out;
  out.reserve(64 + cloud.points.size() * 32);
  out += "ply\nformat ascii 1.0\n";
  out += "element vertex " + std::to_string(cloud.points.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_colors()) {
    out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out += "end_header\n";
  char line[128];
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (cloud.has_colors()) {
      const Rgb8& c = cloud.colors[i];
      std::snprintf(line, sizeof(line), "%.6g %.6g %.6g %u %u %u\n", p.x, p.y, p.z,
                    c.r, c.g, c.b);
    } else {
      std::snprintf(line, sizeof(line), "%.6g %.6g %.6g\n", p.x, p.y, p.z);
    }
    out += line;
  }
  atomic_write_bytes(path, out);
}

}  // namespace stereotac::io
