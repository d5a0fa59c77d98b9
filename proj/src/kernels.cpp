#include "stereotac/kernels.hpp"

#include <cstdlib>

namespace stereotac::kernels {

namespace {

Table make_scalar_table() {
  Table t{};
  t.absdiff_add_u16 = &scalar::absdiff_add_u16;
  t.absdiff_sub_u16 = &scalar::absdiff_sub_u16;
  t.dot_f32 = &scalar::dot_f32;
  t.axpy_f32 = &scalar::axpy_f32;
  t.sum_sq_f32 = &scalar::sum_sq_f32;
  t.f32_to_u8 = &scalar::f32_to_u8;
  t.name = "scalar";
  return t;
}

#if defined(STEREOTAC_HAVE_AVX2)
Table make_avx2_table() {
  Table t{};
  t.absdiff_add_u16 = &avx2::absdiff_add_u16;
  t.absdiff_sub_u16 = &avx2::absdiff_sub_u16;
  t.dot_f32 = &avx2::dot_f32;
  t.axpy_f32 = &avx2::axpy_f32;
  t.sum_sq_f32 = &avx2::sum_sq_f32;
  t.f32_to_u8 = &avx2::f32_to_u8;
  t.name = "avx2";
  return t;
}
#endif

Table select() {
#if defined(STEREOTAC_HAVE_AVX2)
  if (avx2_available() && std::getenv("STEREOTAC_FORCE_SCALAR") == nullptr) {
    return make_avx2_table();
  }
#endif
  return make_scalar_table();
}

}  // namespace

bool avx2_available() {
#if defined(STEREOTAC_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& scalar_table() {
  static const Table t = make_scalar_table();
  return t;
}

const Table& active() {
  static const Table t = select();
  return t;
}

}  // namespace stereotac::kernels
