#include "swl/simd.hpp"

#include "swl/common.hpp"

namespace swl::simd {

namespace {

bool avx2_supported() {
#if defined(SWL_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend& backend_ref() {
  static Backend b = avx2_supported() ? Backend::Avx2 : Backend::Scalar;
  return b;
}

}  // namespace

Backend active_backend() { return backend_ref(); }

void force_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported())
    throw SwlError(ErrorCode::Config, "AVX2 backend not available on this host");
  backend_ref() = b;
}

std::string backend_name() { return backend_ref() == Backend::Avx2 ? "avx2" : "scalar"; }

double sum_reciprocal(const double* c, const double* m, std::size_t n, double x) {
#if defined(SWL_BUILD_AVX2)
  if (backend_ref() == Backend::Avx2) return avx2::sum_reciprocal(c, m, n, x);
#endif
  return scalar::sum_reciprocal(c, m, n, x);
}

double sum_abs_reciprocal(const double* c, const double* m, std::size_t n, double x) {
#if defined(SWL_BUILD_AVX2)
  if (backend_ref() == Backend::Avx2) return avx2::sum_abs_reciprocal(c, m, n, x);
#endif
  return scalar::sum_abs_reciprocal(c, m, n, x);
}

double sum_riesz2(const double* cx, const double* cy, const double* m, std::size_t n, double x,
                  double y, int axis) {
#if defined(SWL_BUILD_AVX2)
  if (backend_ref() == Backend::Avx2) return avx2::sum_riesz2(cx, cy, m, n, x, y, axis);
#endif
  return scalar::sum_riesz2(cx, cy, m, n, x, y, axis);
}

void sum_riesz2_with_abs(const double* cx, const double* cy, const double* m, std::size_t n,
                         double x, double y, int axis, double* out, double* out_abs) {
#if defined(SWL_BUILD_AVX2)
  if (backend_ref() == Backend::Avx2)
    return avx2::sum_riesz2_with_abs(cx, cy, m, n, x, y, axis, out, out_abs);
#endif
  return scalar::sum_riesz2_with_abs(cx, cy, m, n, x, y, axis, out, out_abs);
}

}  // namespace swl::simd
