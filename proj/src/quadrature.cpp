#include "swl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace swl {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct GLRule {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;
};

// Newton iteration on Legendre polynomials; computed once per order.
GLRule make_rule(int n) {
  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1 - x * x) * pp * pp);
  }
  return r;
}

const GLRule& rule8() {
  static const GLRule r = make_rule(8);
  return r;
}
const GLRule& rule16() {
  static const GLRule r = make_rule(16);
  return r;
}

double tensor_gl(const KernelSpec& spec, const DPoint& x, const DBox& b, const GLRule& r) {
  const int d = b.dim;
  const int n = static_cast<int>(r.x.size());
  double sum = 0;
  DPoint y{};
  if (d == 1) {
    double mid = 0.5 * (b.lo[0] + b.hi[0]), half = 0.5 * (b.hi[0] - b.lo[0]);
    for (int i = 0; i < n; ++i) {
      y[0] = mid + half * r.x[i];
      sum += r.w[i] * kernel_value(spec, x, y);
    }
    return sum * half;
  }
  if (d == 2) {
    double m0 = 0.5 * (b.lo[0] + b.hi[0]), h0 = 0.5 * (b.hi[0] - b.lo[0]);
    double m1 = 0.5 * (b.lo[1] + b.hi[1]), h1 = 0.5 * (b.hi[1] - b.lo[1]);
    for (int i = 0; i < n; ++i) {
      y[0] = m0 + h0 * r.x[i];
      double row = 0;
      for (int j = 0; j < n; ++j) {
        y[1] = m1 + h1 * r.x[j];
        row += r.w[j] * kernel_value(spec, x, y);
      }
      sum += r.w[i] * row;
    }
    return sum * h0 * h1;
  }
  // d == 3
  double m0 = 0.5 * (b.lo[0] + b.hi[0]), h0 = 0.5 * (b.hi[0] - b.lo[0]);
  double m1 = 0.5 * (b.lo[1] + b.hi[1]), h1 = 0.5 * (b.hi[1] - b.lo[1]);
  double m2 = 0.5 * (b.lo[2] + b.hi[2]), h2 = 0.5 * (b.hi[2] - b.lo[2]);
  for (int i = 0; i < n; ++i) {
    y[0] = m0 + h0 * r.x[i];
    for (int j = 0; j < n; ++j) {
      y[1] = m1 + h1 * r.x[j];
      double row = 0;
      for (int k = 0; k < n; ++k) {
        y[2] = m2 + h2 * r.x[k];
        row += r.w[k] * kernel_value(spec, x, y);
      }
      sum += r.w[i] * r.w[j] * row;
    }
  }
  return sum * h0 * h1 * h2;
}

double box_dist(const DPoint& x, const DBox& b) {
  double s = 0;
  for (int i = 0; i < b.dim; ++i) {
    double g = std::max({0.0, b.lo[i] - x[i], x[i] - b.hi[i]});
    s += g * g;
  }
  return std::sqrt(s);
}

double box_side(const DBox& b) {
  double s = 0;
  for (int i = 0; i < b.dim; ++i) s = std::max(s, b.hi[i] - b.lo[i]);
  return s;
}

}  // namespace

DBox to_dbox(const TriadicAddress& a) {
  DBox b;
  b.dim = a.dim;
  const double s = std::pow(3.0, -a.level);
  for (int i = 0; i < a.dim; ++i) {
    b.lo[i] = static_cast<double>(a.coords[i]) * s;
    b.hi[i] = static_cast<double>(a.coords[i] + 1) * s;
  }
  return b;
}

QuadResult cube_integral(const KernelSpec& spec, const DPoint& x, const DBox& cube,
                         double rel_tol) {
  if (box_dist(x, cube) < box_side(cube) / 10.0)
    throw SingularityTooCloseError("cube_integral: singularity within side/10 of the cell");

  QuadResult out;
  struct Item {
    DBox b;
    int depth;
  };
  std::vector<Item> stack{{cube, 0}};
  const int max_depth = 28;
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    double coarse = tensor_gl(spec, x, it.b, rule8());
    double fine = tensor_gl(spec, x, it.b, rule16());
    double diff = std::abs(fine - coarse);
    double scale = std::max(std::abs(fine), 1e-300);
    if (diff <= rel_tol * scale || it.depth >= max_depth) {
      out.value += fine;
      out.error_estimate += diff;
      continue;
    }
    // Split along the largest extent; the half nearer x keeps subdividing.
    int ax = 0;
    for (int i = 1; i < it.b.dim; ++i)
      if (it.b.hi[i] - it.b.lo[i] > it.b.hi[ax] - it.b.lo[ax]) ax = i;
    double mid = 0.5 * (it.b.lo[ax] + it.b.hi[ax]);
    DBox left = it.b, right = it.b;
    left.hi[ax] = mid;
    right.lo[ax] = mid;
    stack.push_back({left, it.depth + 1});
    stack.push_back({right, it.depth + 1});
  }
  return out;
}

QuadResult cube_integral(const KernelSpec& spec, const DPoint& x, const TriadicAddress& cube,
                         double rel_tol) {
  return cube_integral(spec, x, to_dbox(cube), rel_tol);
}

double pv_box_interior(const KernelSpec& spec, const DPoint& x, const DBox& box) {
  const int d = box.dim;
  for (int i = 0; i < d; ++i)
    if (!(x[i] > box.lo[i] && x[i] < box.hi[i]))
      throw SwlError(ErrorCode::Config, "pv_box_interior: point not interior");

  if (d == 1) {
    // p.v. of Omega(sign)/|x-y| over [lo,hi]: the symmetric part about x
    // cancels by mean zero, leaving Omega(+1) ln(x-lo) + Omega(-1) ln(hi-x).
    double op = spec.omega({1.0, 0, 0});
    double om = spec.omega({-1.0, 0, 0});
    return op * std::log(x[0] - box.lo[0]) + om * std::log(box.hi[0] - x[0]);
  }
  if (d != 2) throw SwlError(ErrorCode::Config, "pv_box_interior: d > 2 unsupported");

  // Polar form about x: integral over theta of Omega(-theta_hat) ln R(theta),
  // with R the ray exit distance to the box boundary. The ln(1/rho) term
  // vanishes by mean zero, so the value does not depend on the excluded ball.
  std::vector<double> cuts;
  for (double cx : {box.lo[0], box.hi[0]})
    for (double cy : {box.lo[1], box.hi[1]}) cuts.push_back(std::atan2(cy - x[1], cx - x[0]));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(cuts.front() + 2 * kPi);

  auto exit_dist = [&](double th) {
    double cth = std::cos(th), sth = std::sin(th);
    double t = 1e300;
    if (cth > 0) t = std::min(t, (box.hi[0] - x[0]) / cth);
    if (cth < 0) t = std::min(t, (box.lo[0] - x[0]) / cth);
    if (sth > 0) t = std::min(t, (box.hi[1] - x[1]) / sth);
    if (sth < 0) t = std::min(t, (box.lo[1] - x[1]) / sth);
    return t;
  };
  auto integrand = [&](double th) {
    DPoint u{-std::cos(th), -std::sin(th), 0};  // direction of x - y
    return spec.omega(u) * std::log(exit_dist(th));
  };

  const GLRule& r = rule16();
  double total = 0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double a = cuts[s], b = cuts[s + 1];
    if (b - a < 1e-15) continue;
    // three panels per smooth arc
    for (int p = 0; p < 3; ++p) {
      double pa = a + (b - a) * p / 3.0, pb = a + (b - a) * (p + 1) / 3.0;
      double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      for (std::size_t i = 0; i < r.x.size(); ++i) total += r.w[i] * half * integrand(mid + half * r.x[i]);
    }
  }
  return total;
}

double pv_self_integral(const KernelSpec& spec, const DPoint& x, const TriadicAddress& cube) {
  DBox b = to_dbox(cube);
  const double rho = (b.hi[0] - b.lo[0]) / 3.0;
  for (int i = 0; i < b.dim; ++i)
    if (std::min(x[i] - b.lo[i], b.hi[i] - x[i]) < rho * (1 - 1e-12))
      throw BallNotContainedError("pv_self_integral: ball B(x, side/3) not inside the cube");
  return pv_box_interior(spec, x, b);
}

double midpoint_rule(const KernelSpec& spec, const DPoint& x, const DBox& cube, int n) {
  const int d = cube.dim;
  double sum = 0;
  DPoint y{};
  if (d == 1) {
    double h = (cube.hi[0] - cube.lo[0]) / n;
    for (int i = 0; i < n; ++i) {
      y[0] = cube.lo[0] + (i + 0.5) * h;
      sum += kernel_value(spec, x, y);
    }
    return sum * h;
  }
  if (d == 2) {
    double h0 = (cube.hi[0] - cube.lo[0]) / n, h1 = (cube.hi[1] - cube.lo[1]) / n;
    for (int i = 0; i < n; ++i) {
      y[0] = cube.lo[0] + (i + 0.5) * h0;
      for (int j = 0; j < n; ++j) {
        y[1] = cube.lo[1] + (j + 0.5) * h1;
        sum += kernel_value(spec, x, y);
      }
    }
    return sum * h0 * h1;
  }
  throw SwlError(ErrorCode::Config, "midpoint_rule: d > 2 unsupported");
}

}  // namespace swl
