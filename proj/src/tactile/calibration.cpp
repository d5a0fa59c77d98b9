#include "stereotac/tactile/calibration.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "stereotac/image_io.hpp"

namespace stereotac::tactile {

FeaturePlanes compute_features(const ImageRgb8& frame, const ImageRgb8& reference,
                               const FeatureOptions& opt) {
  if (frame.width() != reference.width() || frame.height() != reference.height()) {
    throw Error("reference frame size mismatch");
  }
  FeaturePlanes planes;
  planes.width = frame.width();
  planes.height = frame.height();
  planes.mask = hsv_mask(frame, opt.hsv);
  planes.r.resize(frame.pixel_count());
  planes.b.resize(frame.pixel_count());
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    const double dr = (frame.pixels()[i].r - reference.pixels()[i].r) / 255.0;
    const double db = (frame.pixels()[i].b - reference.pixels()[i].b) / 255.0;
    planes.r[i] = static_cast<float>(0.5 + dr);
    planes.b[i] = static_cast<float>(0.5 + db);
    if (planes.mask[i] && std::abs(dr) + std::abs(db) <= opt.diff_threshold) {
      planes.mask[i] = 0;
    }
  }
  return planes;
}

std::vector<CalibrationSample> gen_ball_labels(const sim::TactileFramePair& pair,
                                               const sim::TactileFramePair& reference,
                                               double center_x_px, double center_y_px,
                                               double ball_radius_px,
                                               const FeatureOptions& opt,
                                               double max_radius_px) {
  if (ball_radius_px <= 0.0) throw Error("ball radius must be > 0");
  if (pair.frame_dx.width() != pair.frame_dy.width() ||
      pair.frame_dx.height() != pair.frame_dy.height()) {
    throw Error("tactile frame pair dimensions differ");
  }
  const double accept_px = max_radius_px > 0.0
                               ? std::min(max_radius_px, ball_radius_px)
                               : ball_radius_px;

  std::vector<CalibrationSample> samples;
  const ImageRgb8* frames[2] = {&pair.frame_dx, &pair.frame_dy};
  const ImageRgb8* refs[2] = {&reference.frame_dx, &reference.frame_dy};
  const int w = pair.frame_dx.width();
  const int h = pair.frame_dx.height();

  for (int step = 0; step < 2; ++step) {
    const FeaturePlanes planes = compute_features(*frames[step], *refs[step], opt);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!planes.mask[i]) continue;
        const double ox = x - center_x_px;
        const double oy = y - center_y_px;
        if (ox * ox + oy * oy >= accept_px * accept_px) continue;
        CalibrationSample s;
        s.r = planes.r[i];
        s.b = planes.b[i];
        s.x = static_cast<float>(2.0 * x / (w - 1) - 1.0);
        s.y = static_cast<float>(2.0 * y / (h - 1) - 1.0);
        s.dx_rad = std::asin(ox / ball_radius_px);
        s.dy_rad = std::asin(oy / ball_radius_px);
        s.axis = static_cast<std::uint8_t>(step);
        samples.push_back(s);
      }
    }
  }
  if (samples.empty()) throw Error("empty calibration frame");
  return samples;
}

void write_samples_csv(const std::vector<CalibrationSample>& samples,
                       const std::filesystem::path& path) {
  std::string out = "R,B,x,y,dx,dy,axis\n";
  char line[160];
  for (const CalibrationSample& s : samples) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%.9g,%.17g,%.17g,%u\n",
                  static_cast<double>(s.r), static_cast<double>(s.b),
                  static_cast<double>(s.x), static_cast<double>(s.y), s.dx_rad,
                  s.dy_rad, static_cast<unsigned>(s.axis));
    out += line;
  }
  io::atomic_write_bytes(path, out);
}

std::vector<CalibrationSample> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "R,B,x,y,dx,dy,axis") {
    throw Error("calibration CSV schema error at line 1: expected header R,B,x,y,dx,dy,axis");
  }
  std::vector<CalibrationSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    CalibrationSample s;
    double r, b, x, y;
    unsigned axis;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%u", &r, &b, &x, &y,
                    &s.dx_rad, &s.dy_rad, &axis) != 7 ||
        axis > 1) {
      throw Error("calibration CSV schema error at line " + std::to_string(line_no));
    }
    s.r = static_cast<float>(r);
    s.b = static_cast<float>(b);
    s.x = static_cast<float>(x);
    s.y = static_cast<float>(y);
    s.axis = static_cast<std::uint8_t>(axis);
    samples.push_back(s);
  }
  return samples;
}

}  // namespace stereotac::tactile
