#include "stereotac/stereo/match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stereotac/kernels.hpp"

namespace stereotac::stereo {

void BlockMatchSettings::validate() const {
  if (window < 3 || window % 2 == 0) throw Error("match window must be odd and >= 3");
  if (min_disparity < 0 || max_disparity < min_disparity) {
    throw Error("invalid disparity search range");
  }
  if (uniqueness_ratio < 1.0) throw Error("uniqueness ratio must be >= 1");
}

std::vector<std::uint8_t> to_grayscale(const ImageRgb8& image) {
  std::vector<std::uint8_t> gray(image.pixel_count());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const Rgb8& px = image.pixels()[i];
    gray[i] = static_cast<std::uint8_t>((77 * px.r + 150 * px.g + 29 * px.b) >> 8);
  }
  return gray;
}

namespace {

constexpr std::uint32_t kInvalidCost = std::numeric_limits<std::uint32_t>::max();

// Running per-(disparity, column) SAD sums over the vertical window, slid one
// image row at a time. The absdiff row kernels carry the heavy lifting.
class ColumnCosts {
 public:
  ColumnCosts(const std::uint8_t* left, const std::uint8_t* right, int width,
              int n_disp, int min_disp)
      : left_(left), right_(right), width_(width), n_disp_(n_disp), min_disp_(min_disp),
        sums_(static_cast<std::size_t>(n_disp) * width, 0) {}

  void add_row(int y) { apply_row(y, /*add=*/true); }
  void retire_row(int y) { apply_row(y, /*add=*/false); }

  const std::uint16_t* row(int d_index) const {
    return sums_.data() + static_cast<std::size_t>(d_index) * width_;
  }

 private:
  void apply_row(int y, bool add) {
    const auto& k = kernels::active();
    const std::uint8_t* lrow = left_ + static_cast<std::size_t>(y) * width_;
    const std::uint8_t* rrow = right_ + static_cast<std::size_t>(y) * width_;
    for (int di = 0; di < n_disp_; ++di) {
      const int d = min_disp_ + di;
      if (d >= width_) continue;
      std::uint16_t* acc = sums_.data() + static_cast<std::size_t>(di) * width_ + d;
      const std::size_t n = static_cast<std::size_t>(width_ - d);
      if (add) {
        k.absdiff_add_u16(acc, lrow + d, rrow, n);
      } else {
        k.absdiff_sub_u16(acc, lrow + d, rrow, n);
      }
    }
  }

  const std::uint8_t* left_;
  const std::uint8_t* right_;
  int width_;
  int n_disp_;
  int min_disp_;
  std::vector<std::uint16_t> sums_;
};

}  // namespace

DisparityMap block_match(const ImageRgb8& left, const ImageRgb8& right,
                         const BlockMatchSettings& settings) {
  settings.validate();
  if (left.width() != right.width() || left.height() != right.height()) {
    throw Error("stereo pair dimensions differ");
  }
  const int w = left.width(), h = left.height();
  if (settings.window > w || settings.window > h) {
    throw Error("match window larger than the image");
  }

  const std::vector<std::uint8_t> lgray = to_grayscale(left);
  const std::vector<std::uint8_t> rgray = to_grayscale(right);
  const int hw = settings.window / 2;
  const int n_disp = settings.max_disparity - settings.min_disparity + 1;

  DisparityMap result{FloatMap(w, h, MapUnit::DisparityPx, FloatMap::kDefaultSentinel),
                      settings};
  result.map.declare_sentinel(FloatMap::kDefaultSentinel);

  // Horizontal texture: |dI/dx| column sums over the vertical window, slid in
  // lockstep with the cost sums.
  std::vector<std::uint32_t> texture_col(w, 0);
  auto texture_row_apply = [&](int y, int sign) {
    const std::uint8_t* row = lgray.data() + static_cast<std::size_t>(y) * w;
    for (int x = 1; x + 1 < w; ++x) {
      const int g = std::abs(static_cast<int>(row[x + 1]) - static_cast<int>(row[x - 1]));
      texture_col[x] += sign * g;
    }
  };

  ColumnCosts costs(lgray.data(), rgray.data(), w, n_disp, settings.min_disparity);
  for (int y = 0; y < settings.window - 1; ++y) {
    costs.add_row(y);
    texture_row_apply(y, +1);
  }

  std::vector<std::uint32_t> cost_volume(static_cast<std::size_t>(n_disp) * w);

  for (int y = hw; y < h - hw; ++y) {
    costs.add_row(y + hw);
    texture_row_apply(y + hw, +1);

    // Horizontal box sum of the column sums -> full window SAD per (d, x).
    for (int di = 0; di < n_disp; ++di) {
      const int d = settings.min_disparity + di;
      const std::uint16_t* col = costs.row(di);
      std::uint32_t* out = cost_volume.data() + static_cast<std::size_t>(di) * w;
      std::fill(out, out + w, kInvalidCost);
      const int x_begin = std::max(hw, d + hw);  // right window must stay in-image
      if (x_begin >= w - hw) continue;
      std::uint32_t acc = 0;
      for (int x = x_begin - hw; x <= x_begin + hw; ++x) acc += col[x];
      out[x_begin] = acc;
      for (int x = x_begin + 1; x < w - hw; ++x) {
        acc += col[x + hw];
        acc -= col[x - hw - 1];
        out[x] = acc;
      }
    }

    // Texture gate for this row band.
    std::vector<std::uint32_t> texture_win(w, 0);
    {
      std::uint32_t acc = 0;
      for (int x = 0; x <= 2 * hw && x < w; ++x) acc += texture_col[x];
      texture_win[hw] = acc;
      for (int x = hw + 1; x < w - hw; ++x) {
        acc += texture_col[x + hw];
        acc -= texture_col[x - hw - 1];
        texture_win[x] = acc;
      }
    }

    for (int x = hw; x < w - hw; ++x) {
      if (texture_win[x] < static_cast<std::uint32_t>(settings.texture_threshold)) {
        continue;
      }
      std::uint32_t best = kInvalidCost;
      int best_di = -1;
      for (int di = 0; di < n_disp; ++di) {
        const std::uint32_t c = cost_volume[static_cast<std::size_t>(di) * w + x];
        if (c < best) {
          best = c;
          best_di = di;
        }
      }
      if (best_di < 0 || best == kInvalidCost) continue;

      // Second-best outside the immediate neighborhood of the winner.
      std::uint32_t second = kInvalidCost;
      for (int di = 0; di < n_disp; ++di) {
        if (std::abs(di - best_di) <= 1) continue;
        second = std::min(second, cost_volume[static_cast<std::size_t>(di) * w + x]);
      }
      if (second != kInvalidCost &&
          static_cast<double>(second) < static_cast<double>(best) * settings.uniqueness_ratio) {
        continue;
      }

      double disparity = settings.min_disparity + best_di;
      if (best_di > 0 && best_di + 1 < n_disp) {
        const double cm = cost_volume[static_cast<std::size_t>(best_di - 1) * w + x];
        const double cp = cost_volume[static_cast<std::size_t>(best_di + 1) * w + x];
        if (cm != kInvalidCost && cp != kInvalidCost) {
          const double denom = cm - 2.0 * best + cp;
          if (denom > 0.0) {
            disparity += 0.5 * (cm - cp) / denom;
          }
        }
      }
      result.map.at(x, y) = static_cast<float>(disparity);
    }

    costs.retire_row(y - hw);
    texture_row_apply(y - hw, -1);
  }
  return result;
}

}  // namespace stereotac::stereo
