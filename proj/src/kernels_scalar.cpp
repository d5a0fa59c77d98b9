#include "stereotac/kernels.hpp"

#include <cmath>

namespace stereotac::kernels::scalar {

void absdiff_add_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    acc[i] = static_cast<std::uint16_t>(acc[i] + (d < 0 ? -d : d));
  }
}

void absdiff_sub_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    acc[i] = static_cast<std::uint16_t>(acc[i] - (d < 0 ? -d : d));
  }
}

double dot_f32(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

void axpy_f32(float* y, float alpha, const float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

Sums sum_sq_f32(const float* v, std::size_t n) {
  Sums s;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i];
    s.sum += d;
    s.sum_sq += d * d;
  }
  return s;
}

void f32_to_u8(std::uint8_t* dst, const float* src, float scale, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    // lrintf rounds to nearest even under the default FP environment,
    // matching the vector conversion on x86.
    long v = std::lrintf(src[i] * scale);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    dst[i] = static_cast<std::uint8_t>(v);
  }
}

}  // namespace stereotac::kernels::scalar
