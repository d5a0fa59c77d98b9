#include <algorithm>
#include <cmath>

#include "stereotac/kernels.hpp"
#include "stereotac/sim/render.hpp"

namespace stereotac::sim {

namespace {

// Hash-based lattice so the procedural texture is random-access and
// deterministic in the seed.
double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
  std::uint64_t h = seed;
  h ^= 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(ix + 0x2545f491ll);
  h ^= 0xc2b2ae3d27d4eb4full * static_cast<std::uint64_t>(iy + 0x632be5abll);
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  h ^= h >> 31;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t seed, double x, double y, double cell) {
  const double gx = x / cell, gy = y / cell;
  const double fx = gx - std::floor(gx), fy = gy - std::floor(gy);
  const auto ix = static_cast<std::int64_t>(std::floor(gx));
  const auto iy = static_cast<std::int64_t>(std::floor(gy));
  const double sx = fx * fx * (3.0 - 2.0 * fx);
  const double sy = fy * fy * (3.0 - 2.0 * fy);
  const double v00 = lattice_value(seed, ix, iy);
  const double v10 = lattice_value(seed, ix + 1, iy);
  const double v01 = lattice_value(seed, ix, iy + 1);
  const double v11 = lattice_value(seed, ix + 1, iy + 1);
  return (1 - sy) * ((1 - sx) * v00 + sx * v10) + sy * ((1 - sx) * v01 + sx * v11);
}

// Scene plane albedo at a world point (mm), either from the procedural
// multi-octave texture or from a user texture sampled with wraparound.
double plane_albedo(const ExternalScene& scene, double x_mm, double y_mm) {
  if (scene.texture.width() > 0) {
    const double u = x_mm * scene.texture_px_per_mm;
    const double v = y_mm * scene.texture_px_per_mm;
    const int tx = static_cast<int>(std::floor(u)) % scene.texture.width();
    const int ty = static_cast<int>(std::floor(v)) % scene.texture.height();
    const Rgb8 t = scene.texture.at(tx < 0 ? tx + scene.texture.width() : tx,
                                    ty < 0 ? ty + scene.texture.height() : ty);
    return (t.r * 77 + t.g * 150 + t.b * 29) / (256.0 * 255.0);
  }
  const double u = x_mm * scene.texture_px_per_mm;
  const double v = y_mm * scene.texture_px_per_mm;
  const double n = 0.35 * value_noise(scene.texture_seed * 4 + 1, u, v, 24.0) +
                   0.25 * value_noise(scene.texture_seed * 4 + 2, u, v, 7.0) +
                   0.22 * value_noise(scene.texture_seed * 4 + 3, u, v, 2.3) +
                   0.18 * value_noise(scene.texture_seed * 4 + 4, u, v, 1.0);
  return n;
}

void gaussian_blur_f32(std::vector<float>& data, int w, int h, double sigma) {
  if (sigma <= 0.05) return;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> kernel(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)));
    norm += kernel[i + radius];
  }
  for (float& k : kernel) k = static_cast<float>(k / norm);

  std::vector<float> tmp(data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * data[static_cast<std::size_t>(y) * w + xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      data[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
}

ImageRgb8 render_camera(const ExternalScene& scene, const MembraneSpec& membrane,
                        const stereo::PinholeCamera& cam,
                        const Eigen::Vector3d& center_mm, double distance_mm,
                        Rng speckle_rng, Rng jitter_rng, bool zero_noise) {
  const int w = cam.width, h = cam.height;
  std::vector<float> gray(static_cast<std::size_t>(w) * h, 0.0f);

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      // Ideal pinhole ray; the view plane is fronto-parallel at Z = distance.
      const double nx = (u - cam.cx) / cam.fx;
      const double ny = (v - cam.cy) / cam.fy;
      const double t = distance_mm - center_mm.z();
      const double px = center_mm.x() + nx * t;
      const double py = center_mm.y() + ny * t;
      const double albedo = plane_albedo(scene, px, py);
      gray[static_cast<std::size_t>(v) * w + u] =
          static_cast<float>((20.0 + 215.0 * albedo) / 255.0);
    }
  }

  gaussian_blur_f32(gray, w, h, membrane.opacity * membrane.stereo_blur_px_per_opacity);

  if (!zero_noise) {
    if (membrane.speckle_density > 0.0) {
      // Static paint spots: fixed per membrane seed and camera, heavily
      // defocused since the coating sits millimeters from the lens.
      std::vector<float> spots(gray.size(), 1.0f);
      for (auto& s : spots) {
        const bool hit = speckle_rng.uniform01() < membrane.speckle_density;
        const float factor = static_cast<float>(speckle_rng.uniform(0.7, 1.3));
        if (hit) s = factor;
      }
      gaussian_blur_f32(spots, w, h, 2.5);
      for (std::size_t i = 0; i < gray.size(); ++i) gray[i] *= spots[i];
    }
    if (membrane.stereo_jitter > 0.0) {
      for (auto& g : gray) {
        g += static_cast<float>(jitter_rng.normal(0.0, membrane.stereo_jitter / 255.0));
      }
    }
  }

  ImageRgb8 out(w, h);
  std::vector<std::uint8_t> bytes(gray.size());
  kernels::active().f32_to_u8(bytes.data(), gray.data(), 255.0f, gray.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out.pixels()[i] = {bytes[i], bytes[i], bytes[i]};
  }
  return out;
}

}  // namespace

std::pair<ImageRgb8, ImageRgb8> render_stereo_pair(const ExternalScene& scene,
                                                   const MembraneSpec& membrane,
                                                   const stereo::StereoRig& rig,
                                                   const StereoRenderOptions& opt) {
  membrane.validate();
  scene.validate();
  rig.validate();
  if (!scene.plane_distance_mm) throw Error("stereo render requires a scene plane");
  const double dist = *scene.plane_distance_mm;
  if (dist <= 0.0) throw Error("plane behind camera");

  const Eigen::Vector3d left_center(0.0, 0.0, 0.0);
  const Eigen::Vector3d right_center = -rig.rotation.transpose() * rig.translation_mm;

  const Rng base(opt.seed);
  auto left = render_camera(scene, membrane, rig.left, left_center, dist,
                            base.fork(0x5350ec00), base.fork(0x4a00 + opt.frame_index * 2),
                            opt.zero_noise);
  auto right = render_camera(scene, membrane, rig.right, right_center, dist,
                             base.fork(0x5350ec01),
                             base.fork(0x4a01 + opt.frame_index * 2), opt.zero_noise);
  return {std::move(left), std::move(right)};
}

}  // namespace stereotac::sim
