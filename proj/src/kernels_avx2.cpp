// AVX2 variants. Compiled with -mavx2 -mfma on x86-64 only; callers reach
// them through the runtime-dispatched table, never directly.
#include "stereotac/kernels.hpp"

#if defined(STEREOTAC_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace stereotac::kernels::avx2 {

void absdiff_add_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m128i va = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a + i));
    const __m128i vb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b + i));
    // |a-b| on u8 via max-min, exact.
    const __m128i ad = _mm_sub_epi8(_mm_max_epu8(va, vb), _mm_min_epu8(va, vb));
    const __m256i wide = _mm256_cvtepu8_epi16(ad);
    __m256i vacc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + i));
    vacc = _mm256_add_epi16(vacc, wide);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + i), vacc);
  }
  for (; i < n; ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    acc[i] = static_cast<std::uint16_t>(acc[i] + (d < 0 ? -d : d));
  }
}

void absdiff_sub_u16(std::uint16_t* acc, const std::uint8_t* a,
                     const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m128i va = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a + i));
    const __m128i vb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b + i));
    const __m128i ad = _mm_sub_epi8(_mm_max_epu8(va, vb), _mm_min_epu8(va, vb));
    const __m256i wide = _mm256_cvtepu8_epi16(ad);
    __m256i vacc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + i));
    vacc = _mm256_sub_epi16(vacc, wide);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + i), vacc);
  }
  for (; i < n; ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    acc[i] = static_cast<std::uint16_t>(acc[i] - (d < 0 ? -d : d));
  }
}

namespace {

inline double hsum_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot_f32(const float* a, const float* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
    const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
    const __m256d b_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vb));
    const __m256d b_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1));
    acc0 = _mm256_fmadd_pd(a_lo, b_lo, acc0);
    acc1 = _mm256_fmadd_pd(a_hi, b_hi, acc1);
  }
  double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

void axpy_f32(float* y, float alpha, const float* x, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vx = _mm256_loadu_ps(x + i);
    const __m256 vy = _mm256_loadu_ps(y + i);
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, vx, vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

Sums sum_sq_f32(const float* v, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d q0 = _mm256_setzero_pd();
  __m256d q1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vv = _mm256_loadu_ps(v + i);
    const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vv));
    const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vv, 1));
    s0 = _mm256_add_pd(s0, lo);
    s1 = _mm256_add_pd(s1, hi);
    q0 = _mm256_fmadd_pd(lo, lo, q0);
    q1 = _mm256_fmadd_pd(hi, hi, q1);
  }
  Sums r;
  r.sum = hsum_pd(_mm256_add_pd(s0, s1));
  r.sum_sq = hsum_pd(_mm256_add_pd(q0, q1));
  for (; i < n; ++i) {
    const double d = v[i];
    r.sum += d;
    r.sum_sq += d * d;
  }
  return r;
}

void f32_to_u8(std::uint8_t* dst, const float* src, float scale, std::size_t n) {
  const __m256 vs = _mm256_set1_ps(scale);
  const __m256i zero = _mm256_setzero_si256();
  const __m256i v255 = _mm256_set1_epi32(255);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_mul_ps(_mm256_loadu_ps(src + i), vs);
    __m256i iv = _mm256_cvtps_epi32(v);  // round-to-nearest-even
    iv = _mm256_max_epi32(iv, zero);
    iv = _mm256_min_epi32(iv, v255);
    const __m128i lo = _mm256_castsi256_si128(iv);
    const __m128i hi = _mm256_extracti128_si256(iv, 1);
    const __m128i packed16 = _mm_packus_epi32(lo, hi);
    const __m128i packed8 = _mm_packus_epi16(packed16, packed16);
    _mm_storel_epi64(reinterpret_cast<__m128i*>(dst + i), packed8);
  }
  for (; i < n; ++i) {
    long v = std::lrintf(src[i] * scale);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    dst[i] = static_cast<std::uint8_t>(v);
  }
}

}  // namespace stereotac::kernels::avx2

#endif  // STEREOTAC_HAVE_AVX2
