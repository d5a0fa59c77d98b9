#include <doctest.h>

#include <cmath>

#include "stereotac/sim/membrane.hpp"
#include "stereotac/sim/render.hpp"
#include "stereotac/stereo/match.hpp"

using namespace stereotac;
using namespace stereotac::sim;

namespace {

double channel_mean(const ImageRgb8& img, int x0, int x1, int y0, int y1, int channel) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const Rgb8& px = img.at(x, y);
      sum += channel == 0 ? px.r : channel == 1 ? px.g : px.b;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("zero penetration leaves the membrane flat") {
  const SensorGrid grid{64, 48, 15.0};
  const auto surface = deform_membrane(IndenterSpec::disk(2.0, 0.0, 32, 24),
                                       MembraneSpec::preset(Finish::SemiReflective), grid);
  for (const float v : surface.values()) CHECK(v == 0.0f);
}

TEST_CASE("stiff disk press is a flat plateau of the right size") {
  SensorGrid grid;  // full 640x480 at 15 px/mm
  MembraneSpec membrane = MembraneSpec::preset(Finish::SemiReflective);
  membrane.stiffness_radius_px = 0.0;
  const auto surface =
      deform_membrane(IndenterSpec::disk(13.0, 1.0, 320, 240), membrane, grid);

  int plateau_width = 0;
  for (int x = 0; x < grid.width; ++x) {
    if (surface.at(x, 240) == -1.0f) ++plateau_width;
  }
  CHECK(plateau_width == 195);  // 13 mm at 15 px/mm

  float min_v = 0.0f;
  for (const float v : surface.values()) {
    CHECK(v <= 0.0f);
    min_v = std::min(min_v, v);
  }
  CHECK(min_v == -1.0f);
}

TEST_CASE("smoothed deformation never exceeds the penetration") {
  const SensorGrid grid{160, 120, 15.0};
  MembraneSpec membrane = MembraneSpec::preset(Finish::SemiMatte);
  membrane.stiffness_radius_px = 8.0;
  const auto surface =
      deform_membrane(IndenterSpec::sphere(3.0, 1.2, 80, 60), membrane, grid);
  for (const float v : surface.values()) {
    CHECK(v <= 0.0f);
    CHECK(v >= -1.2f - 1e-6f);
  }
}

TEST_CASE("sphere cap slopes match the calibration-ball labeling on the axes") {
  const SensorGrid grid{256, 192, 15.0};
  MembraneSpec membrane = MembraneSpec::preset(Finish::SemiReflective);
  membrane.stiffness_radius_px = 0.0;
  const double r_mm = 4.0, p_mm = 1.0, cx = 128, cy = 96;
  const auto surface =
      deform_membrane(IndenterSpec::sphere(r_mm, p_mm, cx, cy), membrane, grid);

  const double r_px = r_mm * grid.px_per_mm;
  const double contact_px = std::sqrt(p_mm * (2 * r_mm - p_mm)) * grid.px_per_mm;
  // Central finite differences along the row through the center, inside the
  // contact circle but away from its rim.
  for (int x = static_cast<int>(cx - contact_px + 4); x < cx + contact_px - 4; ++x) {
    if (std::abs(x - cx) < 2) continue;
    const double slope = (surface.at(x + 1, 96) - surface.at(x - 1, 96)) *
                         grid.px_per_mm / 2.0;
    const double label = std::asin((x - cx) / r_px);
    CHECK(slope == doctest::Approx(std::tan(label)).epsilon(0.02));
  }
}

TEST_CASE("indenter bigger than the grid is rejected") {
  const SensorGrid grid{64, 48, 15.0};
  CHECK_THROWS_WITH_AS(
      deform_membrane(IndenterSpec::disk(13.0, 1.0, 32, 24),
                      MembraneSpec::preset(Finish::Transparent), grid),
      doctest::Contains("larger than the sensor grid"), Error);
}

TEST_CASE("flat surface renders symmetric red/blue response") {
  const SensorGrid grid{128, 128, 15.0};
  MembraneSpec membrane = MembraneSpec::preset(Finish::OpaqueReflective);
  membrane.opacity = 1.0;
  membrane.tactile_noise = 0.0;
  const FloatMap flat(grid.width, grid.height, MapUnit::Millimeters, 0.0f);
  const auto pair =
      render_tactile_pair(flat, {}, membrane, ExternalScene::dark(), 7, grid);

  // dx frame: blue lights the left edge, red the right; the center column
  // sees both at the same distance.
  const int c = grid.width / 2;
  const double red = channel_mean(pair.frame_dx, c - 2, c + 3, 40, 88, 0);
  const double blue = channel_mean(pair.frame_dx, c - 2, c + 3, 40, 88, 2);
  CHECK(red == doctest::Approx(blue).epsilon(0.01));

  const int cy = grid.height / 2;
  const double red_dy = channel_mean(pair.frame_dy, 40, 88, cy - 2, cy + 3, 0);
  const double blue_dy = channel_mean(pair.frame_dy, 40, 88, cy - 2, cy + 3, 2);
  CHECK(red_dy == doctest::Approx(blue_dy).epsilon(0.01));
}

TEST_CASE("sphere press lights the toward-light flank in the row-3 color") {
  const SensorGrid grid{256, 192, 15.0};
  MembraneSpec membrane = MembraneSpec::preset(Finish::SemiReflective);
  membrane.tactile_noise = 0.0;
  const auto surface =
      deform_membrane(IndenterSpec::sphere(4.0, 1.0, 128, 96), membrane, grid);
  const auto pair =
      render_tactile_pair(surface, {}, membrane, ExternalScene::dark(), 3, grid);

  // Left flank of the bowl faces the right edge, where row 3 shines red.
  const double red_left = channel_mean(pair.frame_dx, 100, 120, 92, 100, 0);
  const double red_right = channel_mean(pair.frame_dx, 137, 157, 92, 100, 0);
  CHECK(red_left > red_right + 3.0);

  const double blue_left = channel_mean(pair.frame_dx, 100, 120, 92, 100, 2);
  const double blue_right = channel_mean(pair.frame_dx, 137, 157, 92, 100, 2);
  CHECK(blue_right > blue_left + 3.0);
}

TEST_CASE("fully opaque membrane blocks the scene completely") {
  const SensorGrid grid{96, 96, 15.0};
  MembraneSpec membrane = MembraneSpec::preset(Finish::OpaqueMatte);
  membrane.opacity = 1.0;
  membrane.tactile_noise = 0.0;
  membrane.coating_gain = 0.0;
  membrane.specular_gain = 0.0;
  ExternalScene bright;
  bright.ambient = 1.0;
  const FloatMap flat(grid.width, grid.height, MapUnit::Millimeters, 0.0f);
  const auto pair = render_tactile_pair(flat, {}, membrane, bright, 1, grid);
  for (const Rgb8& px : pair.frame_dx.pixels()) {
    CHECK(px.r == 0);
    CHECK(px.g == 0);
    CHECK(px.b == 0);
  }
}

TEST_CASE("leakage response decreases monotonically with opacity") {
  const SensorGrid grid{128, 128, 15.0};
  ExternalScene scene;
  scene.reflective_object = ReflectiveObject{1.0, 0.6, 4.0, 64.0, 64.0};
  const FloatMap flat(grid.width, grid.height, MapUnit::Millimeters, 0.0f);

  auto peak_extra_red = [&](double opacity) {
    MembraneSpec membrane = MembraneSpec::preset(Finish::Transparent);
    membrane.opacity = opacity;
    membrane.tactile_noise = 0.0;
    const auto with_obj = render_tactile_pair(flat, {}, membrane, scene, 5, grid);
    const auto without =
        render_tactile_pair(flat, {}, membrane, ExternalScene::dark(), 5, grid);
    int peak = 0;
    for (std::size_t i = 0; i < with_obj.frame_dx.pixel_count(); ++i) {
      peak = std::max(peak, static_cast<int>(with_obj.frame_dx.pixels()[i].r) -
                                static_cast<int>(without.frame_dx.pixels()[i].r));
    }
    return peak;
  };

  const int leak_low = peak_extra_red(0.0515);
  const int leak_mid = peak_extra_red(0.2210);
  const int leak_high = peak_extra_red(0.2446);
  CHECK(leak_low > leak_mid);
  CHECK(leak_mid > leak_high);
  CHECK(leak_high > 0);
  CHECK(peak_extra_red(1.0) == 0);
}

TEST_CASE("opacity characterization reproduces the lux table") {
  const double source = 466.0;
  CHECK(measure_opacity(MembraneSpec::preset(Finish::Transparent), source)
            .transmitted_lux == doctest::Approx(442.0).epsilon(0.001));
  CHECK(measure_opacity(MembraneSpec::preset(Finish::Transparent), source).opacity_pct ==
        doctest::Approx(5.15));
  CHECK(measure_opacity(MembraneSpec::preset(Finish::SemiReflective), source)
            .transmitted_lux == doctest::Approx(352.0).epsilon(0.001));
  CHECK(measure_opacity(MembraneSpec::preset(Finish::SemiReflective), source)
            .opacity_pct == doctest::Approx(24.46));
  CHECK(measure_opacity(MembraneSpec::preset(Finish::SemiMatte), source)
            .transmitted_lux == doctest::Approx(363.0).epsilon(0.001));
  CHECK(measure_opacity(MembraneSpec::preset(Finish::OpaqueReflective), source)
            .transmitted_lux == doctest::Approx(93.0).epsilon(0.002));
  CHECK(measure_opacity(MembraneSpec::preset(Finish::OpaqueMatte), source)
            .transmitted_lux == doctest::Approx(141.0).epsilon(0.002));
}

TEST_CASE("ball press sequence is deterministic and in bounds") {
  const SensorGrid grid{320, 240, 15.0};
  const MembraneSpec membrane = MembraneSpec::preset(Finish::SemiReflective);
  const auto a = ball_press_sequence(membrane, 3.0, 5, 99, grid);
  const auto b = ball_press_sequence(membrane, 3.0, 5, 99, grid);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].center_x_px == b[i].center_x_px);
    CHECK(a[i].center_y_px == b[i].center_y_px);
    CHECK(a[i].frames.frame_dx == b[i].frames.frame_dx);
    CHECK(a[i].frames.frame_dy == b[i].frames.frame_dy);
    CHECK(a[i].center_x_px > 0);
    CHECK(a[i].center_x_px < grid.width - 1);
    CHECK(a[i].center_y_px > 0);
    CHECK(a[i].center_y_px < grid.height - 1);
  }
  // Distinct positions across presses.
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK((a[i].center_x_px != a[0].center_x_px || a[i].center_y_px != a[0].center_y_px));
  }
}

TEST_CASE("stereo render: disparity equals f*B/Z on a clean rig") {
  const auto rig = stereo::StereoRig::canonical(320, 240, 400.0, 14.0);
  MembraneSpec membrane = MembraneSpec::preset(Finish::Transparent);
  membrane.opacity = 0.0;
  membrane.speckle_density = 0.0;
  membrane.stereo_jitter = 0.0;
  const ExternalScene scene = ExternalScene::plane(200.0, 11);
  const auto [left, right] = render_stereo_pair(scene, membrane, rig, {});

  stereo::BlockMatchSettings settings;
  settings.max_disparity = 64;
  const auto disparity = stereo::block_match(left, right, settings);
  const double expected = 400.0 * 14.0 / 200.0;  // 28 px

  std::vector<float> valid;
  for (int y = 60; y < 180; ++y) {
    for (int x = 80; x < 240; ++x) {
      if (disparity.map.is_valid(x, y)) valid.push_back(disparity.map.at(x, y));
    }
  }
  REQUIRE(valid.size() > 1000);
  std::sort(valid.begin(), valid.end());
  CHECK(valid[valid.size() / 2] == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("stereo render is deterministic for a fixed seed") {
  const auto rig = stereo::StereoRig::canonical(160, 120, 200.0, 14.0);
  const MembraneSpec membrane = MembraneSpec::preset(Finish::SemiReflective);
  const ExternalScene scene = ExternalScene::plane(150.0, 3);
  StereoRenderOptions opt;
  opt.seed = 42;
  opt.frame_index = 2;
  const auto a = render_stereo_pair(scene, membrane, rig, opt);
  const auto b = render_stereo_pair(scene, membrane, rig, opt);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("scene plane must be present and sane") {
  const auto rig = stereo::StereoRig::canonical(64, 48);
  const MembraneSpec membrane = MembraneSpec::preset(Finish::Transparent);
  CHECK_THROWS_AS(render_stereo_pair(ExternalScene::dark(), membrane, rig, {}), Error);
  CHECK_THROWS_AS(render_stereo_pair(ExternalScene::plane(700.0, 1), membrane, rig, {}),
                  Error);
}

}  // TEST_SUITE
