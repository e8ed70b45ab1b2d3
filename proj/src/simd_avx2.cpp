#include <immintrin.h>

#include <cmath>

#include "swl/simd.hpp"

namespace swl::simd::avx2 {

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}
}  // namespace

double sum_reciprocal(const double* c, const double* m, std::size_t n, double x) {
  const __m256d xv = _mm256_set1_pd(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d cv = _mm256_loadu_pd(c + i);
    __m256d mv = _mm256_loadu_pd(m + i);
    acc = _mm256_add_pd(acc, _mm256_div_pd(mv, _mm256_sub_pd(xv, cv)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += m[i] / (x - c[i]);
  return s;
}

double sum_abs_reciprocal(const double* c, const double* m, std::size_t n, double x) {
  const __m256d xv = _mm256_set1_pd(x);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d cv = _mm256_loadu_pd(c + i);
    __m256d mv = _mm256_loadu_pd(m + i);
    __m256d diff = _mm256_and_pd(_mm256_sub_pd(xv, cv), absmask);
    acc = _mm256_add_pd(acc, _mm256_div_pd(mv, diff));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += m[i] / std::abs(x - c[i]);
  return s;
}

double sum_riesz2(const double* cx, const double* cy, const double* m, std::size_t n, double x,
                  double y, int axis) {
  const __m256d xv = _mm256_set1_pd(x);
  const __m256d yv = _mm256_set1_pd(y);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ux = _mm256_sub_pd(xv, _mm256_loadu_pd(cx + i));
    __m256d uy = _mm256_sub_pd(yv, _mm256_loadu_pd(cy + i));
    __m256d r2 = _mm256_fmadd_pd(ux, ux, _mm256_mul_pd(uy, uy));
    __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(r2, _mm256_sqrt_pd(r2)));
    __m256d num = axis == 0 ? ux : uy;
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(m + i), num), inv));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double dx = x - cx[i], dy = y - cy[i];
    const double r2 = dx * dx + dy * dy;
    s += m[i] * (axis == 0 ? dx : dy) / (r2 * std::sqrt(r2));
  }
  return s;
}

void sum_riesz2_with_abs(const double* cx, const double* cy, const double* m, std::size_t n,
                         double x, double y, int axis, double* out, double* out_abs) {
  const __m256d xv = _mm256_set1_pd(x);
  const __m256d yv = _mm256_set1_pd(y);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  __m256d acca = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ux = _mm256_sub_pd(xv, _mm256_loadu_pd(cx + i));
    __m256d uy = _mm256_sub_pd(yv, _mm256_loadu_pd(cy + i));
    __m256d r2 = _mm256_fmadd_pd(ux, ux, _mm256_mul_pd(uy, uy));
    __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(r2, _mm256_sqrt_pd(r2)));
    __m256d num = axis == 0 ? ux : uy;
    __m256d t = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(m + i), num), inv);
    acc = _mm256_add_pd(acc, t);
    acca = _mm256_add_pd(acca, _mm256_and_pd(t, absmask));
  }
  double s = hsum(acc), sa = hsum(acca);
  for (; i < n; ++i) {
    const double dx = x - cx[i], dy = y - cy[i];
    const double r2 = dx * dx + dy * dy;
    const double t = m[i] * (axis == 0 ? dx : dy) / (r2 * std::sqrt(r2));
    s += t;
    sa += std::abs(t);
  }
  *out = s;
  *out_abs = sa;
}

}  // namespace swl::simd::avx2
