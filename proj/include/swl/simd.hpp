#pragma once

#include <cstddef>
#include <string>

namespace swl::simd {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
void force_backend(Backend b);  // tests only; throws if unsupported
std::string backend_name();

// Hot inner loops of the discrete kernel sums. Each has a scalar reference
// implementation and an AVX2 variant selected at runtime; the pair is
// equivalence-tested.

/// sum of m[i] / (x - c[i])
double sum_reciprocal(const double* c, const double* m, std::size_t n, double x);
/// sum of m[i] / |x - c[i]|
double sum_abs_reciprocal(const double* c, const double* m, std::size_t n, double x);
/// sum of m[i] * (p_axis - c_axis[i]) / |p - c_i|^3   (d = 2 Riesz)
double sum_riesz2(const double* cx, const double* cy, const double* m, std::size_t n, double x,
                  double y, int axis);
/// same, accumulating sum of absolute values as well
void sum_riesz2_with_abs(const double* cx, const double* cy, const double* m, std::size_t n,
                         double x, double y, int axis, double* out, double* out_abs);

// Scalar reference implementations (always available; used in equivalence tests).
namespace scalar {
double sum_reciprocal(const double* c, const double* m, std::size_t n, double x);
double sum_abs_reciprocal(const double* c, const double* m, std::size_t n, double x);
double sum_riesz2(const double* cx, const double* cy, const double* m, std::size_t n, double x,
                  double y, int axis);
void sum_riesz2_with_abs(const double* cx, const double* cy, const double* m, std::size_t n,
                         double x, double y, int axis, double* out, double* out_abs);
}  // namespace scalar

#if defined(SWL_BUILD_AVX2)
namespace avx2 {
double sum_reciprocal(const double* c, const double* m, std::size_t n, double x);
double sum_abs_reciprocal(const double* c, const double* m, std::size_t n, double x);
double sum_riesz2(const double* cx, const double* cy, const double* m, std::size_t n, double x,
                  double y, int axis);
void sum_riesz2_with_abs(const double* cx, const double* cy, const double* m, std::size_t n,
                         double x, double y, int axis, double* out, double* out_abs);
}  // namespace avx2
#endif

}  // namespace swl::simd
