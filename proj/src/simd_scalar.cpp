#include <cmath>

#include "swl/simd.hpp"

namespace swl::simd::scalar {

double sum_reciprocal(const double* c, const double* m, std::size_t n, double x) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += m[i] / (x - c[i]);
  return s;
}

double sum_abs_reciprocal(const double* c, const double* m, std::size_t n, double x) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += m[i] / std::abs(x - c[i]);
  return s;
}

double sum_riesz2(const double* cx, const double* cy, const double* m, std::size_t n, double x,
                  double y, int axis) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ux = x - cx[i];
    const double uy = y - cy[i];
    const double r2 = ux * ux + uy * uy;
    const double inv = 1.0 / (r2 * std::sqrt(r2));
    s += m[i] * (axis == 0 ? ux : uy) * inv;
  }
  return s;
}

void sum_riesz2_with_abs(const double* cx, const double* cy, const double* m, std::size_t n,
                         double x, double y, int axis, double* out, double* out_abs) {
  double s = 0, sa = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ux = x - cx[i];
    const double uy = y - cy[i];
    const double r2 = ux * ux + uy * uy;
    const double inv = 1.0 / (r2 * std::sqrt(r2));
    const double t = m[i] * (axis == 0 ? ux : uy) * inv;
    s += t;
    sa += std::abs(t);
  }
  *out = s;
  *out_abs = sa;
}

}  // namespace swl::simd::scalar
