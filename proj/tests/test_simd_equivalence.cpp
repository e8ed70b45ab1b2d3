#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "swl/simd.hpp"

using namespace swl::simd;

namespace {

struct Arrays {
  std::vector<double> c, cy, m;
  double x, y;
};

Arrays random_arrays(std::mt19937_64& rng, std::size_t n) {
  Arrays a;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  a.c.resize(n);
  a.cy.resize(n);
  a.m.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.c[i] = u(rng) * 1000;
    a.cy[i] = u(rng) * 1000;
    a.m[i] = u(rng) + 1e-3;
  }
  a.x = 2000 + u(rng) * 10;  // keep away from the sources
  a.y = -1500 - u(rng) * 10;
  return a;
}

}  // namespace

TEST_CASE("backend reports something sensible") {
  MESSAGE("active backend: " << backend_name());
  CHECK((active_backend() == Backend::Scalar || active_backend() == Backend::Avx2));
}

TEST_CASE("scalar and dispatched kernels agree") {
  std::mt19937_64 rng(41);
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 64ul, 1001ul}) {
    Arrays a = random_arrays(rng, n);
    const double s1 = scalar::sum_reciprocal(a.c.data(), a.m.data(), n, a.x);
    const double s2 = sum_reciprocal(a.c.data(), a.m.data(), n, a.x);
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));

    const double a1 = scalar::sum_abs_reciprocal(a.c.data(), a.m.data(), n, a.x);
    const double a2 = sum_abs_reciprocal(a.c.data(), a.m.data(), n, a.x);
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-12));

    for (int axis : {0, 1}) {
      const double r1 = scalar::sum_riesz2(a.c.data(), a.cy.data(), a.m.data(), n, a.x, a.y, axis);
      const double r2 = sum_riesz2(a.c.data(), a.cy.data(), a.m.data(), n, a.x, a.y, axis);
      CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
      double v1, v1a, v2, v2a;
      scalar::sum_riesz2_with_abs(a.c.data(), a.cy.data(), a.m.data(), n, a.x, a.y, axis, &v1,
                                  &v1a);
      sum_riesz2_with_abs(a.c.data(), a.cy.data(), a.m.data(), n, a.x, a.y, axis, &v2, &v2a);
      CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
      CHECK(v1a == doctest::Approx(v2a).epsilon(1e-12));
    }
  }
}

#if defined(SWL_BUILD_AVX2)
TEST_CASE("forced AVX2 equals scalar when the host supports it") {
  if (active_backend() != Backend::Avx2) return;  // no AVX2 host
  std::mt19937_64 rng(43);
  Arrays a = random_arrays(rng, 513);
  force_backend(Backend::Scalar);
  const double s = sum_reciprocal(a.c.data(), a.m.data(), a.c.size(), a.x);
  force_backend(Backend::Avx2);
  const double v = sum_reciprocal(a.c.data(), a.m.data(), a.c.size(), a.x);
  CHECK(s == doctest::Approx(v).epsilon(1e-12));
}
#endif

TEST_CASE("signs survive mixed-side targets") {
  // x inside the source range: large cancellations; both paths must agree
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(257), m(257);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = i + 0.5;
    m[i] = u(rng) + 0.5;
  }
  const double x = 128.0;  // between sources
  const double s1 = scalar::sum_reciprocal(c.data(), m.data(), c.size(), x);
  const double s2 = sum_reciprocal(c.data(), m.data(), c.size(), x);
  const double scale = scalar::sum_abs_reciprocal(c.data(), m.data(), c.size(), x);
  CHECK(std::abs(s1 - s2) <= 1e-13 * scale);
}
