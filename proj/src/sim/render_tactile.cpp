#include <algorithm>
#include <cmath>

#include "stereotac/kernels.hpp"
#include "stereotac/sim/render.hpp"

namespace stereotac::sim {

void LightRig::validate() const {
  // Two-step protocol: the x-step drives rows 1/3 (left/right) with blue/red
  // and keeps rows 2/4 off; the y-step mirrors that on rows 2/4.
  const bool dx_ok = dx_colors[0] != RowColor::Off && dx_colors[2] != RowColor::Off &&
                     dx_colors[0] != dx_colors[2] && dx_colors[1] == RowColor::Off &&
                     dx_colors[3] == RowColor::Off;
  const bool dy_ok = dy_colors[1] != RowColor::Off && dy_colors[3] != RowColor::Off &&
                     dy_colors[1] != dy_colors[3] && dy_colors[0] == RowColor::Off &&
                     dy_colors[2] == RowColor::Off;
  if (!dx_ok || !dy_ok) throw Error("light rig violates the two-step row assignment");
  if (intensity <= 0.0) throw Error("light rig intensity must be > 0");
  if (attenuation_per_px < 0.0) throw Error("light attenuation must be >= 0");
}

void ExternalScene::validate() const {
  if (plane_distance_mm && (*plane_distance_mm < 50.0 || *plane_distance_mm > 600.0)) {
    throw Error("scene plane distance outside the sensing range [50, 600] mm");
  }
  if (ambient < 0.0) throw Error("scene ambient must be >= 0");
}

ExternalScene ExternalScene::plane(double distance_mm, std::uint64_t texture_seed) {
  ExternalScene s;
  s.plane_distance_mm = distance_mm;
  s.texture_seed = texture_seed;
  return s;
}

namespace {

struct RowGeometry {
  // Unit direction from a surface point toward the row's light, and the
  // lateral distance to the row in pixels.
  Eigen::Vector3d dir;
  double distance;
};

RowGeometry row_geometry(int row, int x, int y, int w, int h, double elevation_rad) {
  const double ce = std::cos(elevation_rad);
  const double se = std::sin(elevation_rad);
  switch (row) {
    case 0: return {{-ce, 0.0, se}, static_cast<double>(x)};           // left
    case 1: return {{0.0, -ce, se}, static_cast<double>(y)};           // top
    case 2: return {{ce, 0.0, se}, static_cast<double>(w - 1 - x)};    // right
    default: return {{0.0, ce, se}, static_cast<double>(h - 1 - y)};   // bottom
  }
}

// Per-pixel scene radiance on the sensor grid (texture stretched over the
// grid; uniform ambient when no texture is present).
void scene_radiance(const ExternalScene& scene, int x, int y, int w, int h,
                    double rgb[3]) {
  if (scene.ambient <= 0.0) {
    rgb[0] = rgb[1] = rgb[2] = 0.0;
    return;
  }
  if (scene.texture.width() == 0) {
    rgb[0] = rgb[1] = rgb[2] = scene.ambient;
    return;
  }
  const int tx = std::clamp(x * scene.texture.width() / w, 0, scene.texture.width() - 1);
  const int ty =
      std::clamp(y * scene.texture.height() / h, 0, scene.texture.height() - 1);
  const Rgb8 t = scene.texture.at(tx, ty);
  rgb[0] = scene.ambient * t.r / 255.0;
  rgb[1] = scene.ambient * t.g / 255.0;
  rgb[2] = scene.ambient * t.b / 255.0;
}

ImageRgb8 render_step(const FloatMap& surface, const std::array<RowColor, 4>& colors,
                      const LightRig& rig, const MembraneSpec& membrane,
                      const ExternalScene& scene, Rng& noise_rng,
                      const SensorGrid& grid) {
  const int w = surface.width();
  const int h = surface.height();
  const double elevation = rig.elevation_deg * M_PI / 180.0;
  const double see_through = 1.0 - membrane.opacity;

  // Per-capture response drift of the coating; the dominant repeatability
  // term. A single gain per step couples straight into the measured depth
  // scale, unlike per-pixel noise which integrates away.
  const double response_gain =
      membrane.tactile_gain_jitter > 0.0
          ? 1.0 + noise_rng.normal(0.0, membrane.tactile_gain_jitter)
          : 1.0;

  std::vector<float> red(static_cast<std::size_t>(w) * h, 0.0f);
  std::vector<float> green(red.size(), 0.0f);
  std::vector<float> blue(red.size(), 0.0f);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!surface.is_valid(x, y)) continue;  // degenerate pixels stay dark

      // Surface slopes in mm/mm from the mm heightfield on the pixel grid.
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
      const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
      const double hx = (surface.at(xp, y) - surface.at(xm, y)) * grid.px_per_mm /
                        static_cast<double>(xp - xm);
      const double hy = (surface.at(x, yp) - surface.at(x, ym)) * grid.px_per_mm /
                        static_cast<double>(yp - ym);
      const Eigen::Vector3d n = Eigen::Vector3d(-hx, -hy, 1.0).normalized();

      // Orientation of the reflective object's face over this pixel, when one
      // hovers here: a shallow dome bulging toward the membrane.
      bool under_object = false;
      Eigen::Vector3d object_normal = Eigen::Vector3d::UnitZ();
      double object_falloff = 0.0;
      if (scene.reflective_object) {
        const ReflectiveObject& obj = *scene.reflective_object;
        const double dxo = x - obj.center_x_px;
        const double dyo = y - obj.center_y_px;
        const double r_px = 0.5 * obj.diameter_mm * grid.px_per_mm;
        if (dxo * dxo + dyo * dyo < r_px * r_px) {
          under_object = true;
          object_normal = Eigen::Vector3d(-obj.face_slope * dxo / r_px,
                                          -obj.face_slope * dyo / r_px, 1.0)
                              .normalized();
          object_falloff = obj.reflectivity * std::exp(-obj.standoff_mm / 0.7);
        }
      }

      double chan[3] = {0.0, 0.0, 0.0};
      for (int row = 0; row < 4; ++row) {
        if (colors[row] == RowColor::Off) continue;
        const RowGeometry geo = row_geometry(row, x, y, w, h, elevation);
        const double atten = rig.intensity *
                             std::exp(-rig.attenuation_per_px * geo.distance);
        const double lambert = std::max(0.0, n.dot(geo.dir));
        double shade = response_gain * membrane.coating_gain * lambert;
        if (membrane.specular_gain > 0.0) {
          const Eigen::Vector3d refl = 2.0 * n.dot(geo.dir) * n - geo.dir;
          shade += membrane.specular_gain *
                   std::pow(std::max(0.0, refl.z()), membrane.specular_exponent);
        }
        const int c = colors[row] == RowColor::Red ? 0 : 2;
        chan[c] += atten * shade;
        if (under_object) {
          // Double pass: row light escapes through the coating, bounces off
          // the object face and re-enters. The face orientation shapes the
          // returned intensity exactly like a contact gradient would.
          chan[c] += atten * see_through * see_through * object_falloff *
                     std::max(0.0, object_normal.dot(geo.dir));
        }
      }

      // Outside light bleeding through the coating.
      double ext[3];
      scene_radiance(scene, x, y, w, h, ext);
      for (int c = 0; c < 3; ++c) chan[c] += see_through * ext[c];

      if (membrane.tactile_noise > 0.0) {
        for (int c = 0; c < 3; ++c) {
          chan[c] += noise_rng.normal(0.0, membrane.tactile_noise);
        }
      }
      red[idx] = static_cast<float>(chan[0]);
      green[idx] = static_cast<float>(chan[1]);
      blue[idx] = static_cast<float>(chan[2]);
    }
  }

  ImageRgb8 out(w, h);
  std::vector<std::uint8_t> plane(red.size());
  const auto& k = kernels::active();
  const float* planes[3] = {red.data(), green.data(), blue.data()};
  for (int c = 0; c < 3; ++c) {
    k.f32_to_u8(plane.data(), planes[c], 255.0f, plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
      auto& px = out.pixels()[i];
      (c == 0 ? px.r : c == 1 ? px.g : px.b) = plane[i];
    }
  }
  return out;
}

}  // namespace

TactileFramePair render_tactile_pair(const FloatMap& surface, const LightRig& rig,
                                     const MembraneSpec& membrane,
                                     const ExternalScene& scene, std::uint64_t seed,
                                     const SensorGrid& grid) {
  rig.validate();
  membrane.validate();
  scene.validate();
  Rng rng_dx = Rng(seed).fork(0x6478);  // independent noise per step
  Rng rng_dy = Rng(seed).fork(0x6479);
  TactileFramePair pair;
  pair.frame_dx = render_step(surface, rig.dx_colors, rig, membrane, scene, rng_dx, grid);
  pair.frame_dy = render_step(surface, rig.dy_colors, rig, membrane, scene, rng_dy, grid);
  return pair;
}

std::vector<BallPress> ball_press_sequence(const MembraneSpec& membrane,
                                           double ball_radius_mm, int n_frames,
                                           std::uint64_t seed, const SensorGrid& grid,
                                           const LightRig& rig) {
  if (n_frames < 1) throw Error("press count must be >= 1");
  if (ball_radius_mm <= 0.0) throw Error("ball radius must be > 0");
  const double r_px = ball_radius_mm * grid.px_per_mm;
  if (2.0 * r_px > std::min(grid.width, grid.height)) {
    throw Error("indenter larger than the sensor grid");
  }

  Rng rng(seed);
  std::vector<BallPress> presses;
  presses.reserve(static_cast<std::size_t>(n_frames));
  for (int i = 0; i < n_frames; ++i) {
    BallPress press;
    press.penetration_mm = rng.uniform(1.2, 3.2);
    // Keep the whole contact circle plus the smoothing skirt inside the grid.
    const double contact_px =
        std::sqrt(press.penetration_mm * (2.0 * ball_radius_mm - press.penetration_mm)) *
        grid.px_per_mm;
    const double margin = contact_px + 3.0 * membrane.stiffness_radius_px + 4.0;
    press.center_x_px = rng.uniform(margin, grid.width - 1 - margin);
    press.center_y_px = rng.uniform(margin, grid.height - 1 - margin);
    press.ball_radius_px = r_px;

    const IndenterSpec ball = IndenterSpec::sphere(
        ball_radius_mm, press.penetration_mm, press.center_x_px, press.center_y_px);
    const FloatMap surface = deform_membrane(ball, membrane, grid);
    press.frames = render_tactile_pair(surface, rig, membrane, ExternalScene::dark(),
                                       rng.next_u64(), grid);
    presses.push_back(std::move(press));
  }
  return presses;
}

TactileFramePair render_reference_pair(const MembraneSpec& membrane, const LightRig& rig,
                                       const SensorGrid& grid) {
  MembraneSpec quiet = membrane;
  quiet.tactile_noise = 0.0;
  quiet.tactile_gain_jitter = 0.0;
  const FloatMap flat(grid.width, grid.height, MapUnit::Millimeters, 0.0f);
  return render_tactile_pair(flat, rig, quiet, ExternalScene::dark(), 0, grid);
}

}  // namespace stereotac::sim
