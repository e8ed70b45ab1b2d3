#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "swl/quadrature.hpp"

using namespace swl;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("Hilbert integral against a closed form") {
  // int_0^1 (1/pi) sign(2-y)/|2-y| dy = (1/pi) ln 2
  auto h = riesz_kernel(1, 1);
  auto q = cube_integral(h, {2.0, 0, 0}, root_cube(1), 1e-10);
  CHECK(q.value == doctest::Approx(std::log(2.0) / kPi).epsilon(1e-9));
}

TEST_CASE("far-field size bound") {
  auto h = riesz_kernel(1, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.5, 8.0);
  for (int t = 0; t < 30; ++t) {
    double x = u(rng);
    auto q = cube_integral(h, {x, 0, 0}, root_cube(1), 1e-9);
    const double bound = h.sup_omega * 1.0 / (x - 1.0);  // sup|Omega| |Q| / dist^d
    CHECK(std::abs(q.value) <= bound * (1 + 1e-9));
  }
}

TEST_CASE("agreement with the midpoint oracle on random cells") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (const char* id : {"hilbert", "riesz:d=2,j=1"}) {
    auto k = kernel_from_id(id);
    int done = 0;
    while (done < 20) {
      DBox b;
      b.dim = k.d;
      double side = 0.05 + 0.3 * u(rng);
      for (int i = 0; i < k.d; ++i) {
        b.lo[i] = u(rng);
        b.hi[i] = b.lo[i] + side;
      }
      DPoint x{};
      for (int i = 0; i < k.d; ++i) x[i] = u(rng) * 4 - 1.5;
      double dist2 = 0;
      for (int i = 0; i < k.d; ++i) {
        double g = std::max({0.0, b.lo[i] - x[i], x[i] - b.hi[i]});
        dist2 += g * g;
      }
      if (std::sqrt(dist2) < side / 2) continue;  // keep the oracle cheap
      auto q = cube_integral(k, x, b, 1e-10);
      // refine the midpoint rule until stable
      double prev = midpoint_rule(k, x, b, 64);
      double cur = midpoint_rule(k, x, b, 128);
      int n = 128;
      while (std::abs(cur - prev) > 1e-9 * std::max(1.0, std::abs(cur)) && n < 4096) {
        prev = cur;
        n *= 2;
        cur = midpoint_rule(k, x, b, n);
      }
      CHECK(q.value == doctest::Approx(cur).epsilon(2e-8));
      ++done;
    }
  }
}

TEST_CASE("singularity guard") {
  auto h = riesz_kernel(1, 1);
  DBox b;
  b.dim = 1;
  b.lo[0] = 0;
  b.hi[0] = 1;
  CHECK_THROWS_AS(cube_integral(h, {1.05, 0, 0}, b, 1e-8), SingularityTooCloseError);
}

TEST_CASE("pv over a symmetric window vanishes for odd kernels") {
  auto h = riesz_kernel(1, 1);
  CHECK(pv_self_integral(h, {0.5, 0, 0}, root_cube(1)) == doctest::Approx(0.0).epsilon(1e-14));

  auto r = riesz_kernel(2, 1);
  CHECK(pv_self_integral(r, {0.5, 0.5, 0}, root_cube(2)) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("pv example with a closed-form value") {
  // x = 4/9 in [1/3,2/3]: remainder integral is -(1/pi) ln 2
  auto h = riesz_kernel(1, 1);
  auto cube = middle_child(root_cube(1));
  const double x = 4.0 / 9.0;
  CHECK(pv_self_integral(h, {x, 0, 0}, cube) ==
        doctest::Approx(-std::log(2.0) / kPi).epsilon(1e-12));
}

TEST_CASE("pv precondition: the ball must fit") {
  auto h = riesz_kernel(1, 1);
  CHECK_THROWS_AS(pv_self_integral(h, {0.1, 0, 0}, root_cube(1)), BallNotContainedError);
}

TEST_CASE("pv crude bound") {
  auto h = riesz_kernel(1, 1);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.34, 0.66);
  for (int t = 0; t < 50; ++t) {
    double x = 1.0 / 3 + (u(rng) - 1.0 / 3) / 3 + 1.0 / 9;  // inside the middle child
    x = std::clamp(x, 1.0 / 3 + 1.0 / 9 + 1e-6, 2.0 / 3 - 1.0 / 9 - 1e-6);
    auto cube = middle_child(root_cube(1));
    double v = pv_self_integral(h, {x, 0, 0}, cube);
    CHECK(std::abs(v) <= h.sup_omega * 3.0 * 1.0001);  // 3^d sup|Omega|
  }
}

TEST_CASE("pv_box_interior matches a ball-excluded midpoint oracle in d=2") {
  auto k = kernel_from_id("sin3");
  DBox b;
  b.dim = 2;
  b.lo = {0.0, 0.0, 0};
  b.hi = {1.0, 1.0, 0};
  const DPoint x{0.37, 0.61, 0};
  const double val = pv_box_interior(k, x, b);

  // Oracle: midpoint rule over the box minus a small ball B(x, rho); the
  // excluded principal value vanishes in exact arithmetic.
  const double rho = 0.02;
  const int n = 3000;
  double sum = 0;
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double yx = (i + 0.5) * h, yy = (j + 0.5) * h;
      const double dx = x[0] - yx, dy = x[1] - yy;
      if (dx * dx + dy * dy <= rho * rho) continue;
      sum += kernel_value(k, x, {yx, yy, 0}) * h * h;
    }
  }
  CHECK(val == doctest::Approx(sum).epsilon(5e-3));
}
