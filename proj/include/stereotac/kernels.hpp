// Data-parallel inner loops used by the block matcher, the MLP and the
// evaluation metrics. Every kernel has a scalar reference implementation and,
// on x86-64, an AVX2 variant; the active set is chosen once at runtime.
// Integer kernels are bit-exact across variants; float kernels accumulate in
// double on both paths and are equivalence-tested to tight tolerances.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace stereotac::kernels {

struct Sums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

struct Table {
  // acc[i] += |a[i] - b[i]| (widened to u16). Core of the SAD column sums.
  void (*absdiff_add_u16)(std::uint16_t* acc, const std::uint8_t* a,
                          const std::uint8_t* b, std::size_t n);
  // acc[i] -= |a[i] - b[i]|; the sliding-window retire step.
  void (*absdiff_sub_u16)(std::uint16_t* acc, const std::uint8_t* a,
                          const std::uint8_t* b, std::size_t n);
  // Dot product with double accumulation.
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  // y[i] += alpha * x[i].
  void (*axpy_f32)(float* y, float alpha, const float* x, std::size_t n);
  // Sum and sum of squares with double accumulation.
  Sums (*sum_sq_f32)(const float* v, std::size_t n);
  // dst[i] = clamp(round(src[i] * scale), 0, 255); round-to-nearest-even.
  void (*f32_to_u8)(std::uint8_t* dst, const float* src, float scale,
                    std::size_t n);

  const char* name;
};

namespace scalar {
void absdiff_add_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n);
void absdiff_sub_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n);
double dot_f32(const float* a, const float* b, std::size_t n);
void axpy_f32(float* y, float alpha, const float* x, std::size_t n);
Sums sum_sq_f32(const float* v, std::size_t n);
void f32_to_u8(std::uint8_t* dst, const float* src, float scale, std::size_t n);
}  // namespace scalar

#if defined(STEREOTAC_HAVE_AVX2)
namespace avx2 {
void absdiff_add_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n);
void absdiff_sub_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n);
double dot_f32(const float* a, const float* b, std::size_t n);
void axpy_f32(float* y, float alpha, const float* x, std::size_t n);
Sums sum_sq_f32(const float* v, std::size_t n);
void f32_to_u8(std::uint8_t* dst, const float* src, float scale, std::size_t n);
}  // namespace avx2
#endif

/// Active kernel table. Picks AVX2 when the CPU supports it unless
/// STEREOTAC_FORCE_SCALAR is set in the environment.
const Table& active();

const Table& scalar_table();
bool avx2_available();

}  // namespace stereotac::kernels
