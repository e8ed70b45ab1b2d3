#include "swl/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace swl {
namespace {

constexpr double kPi = 3.14159265358979323846;

double norm(const DPoint& u, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += u[i] * u[i];
  return std::sqrt(s);
}

/// Sphere sample grid: d=1 -> {+1,-1}; d=2 -> n equispaced angles;
/// d=3 -> latitude/longitude product grid.
std::vector<DPoint> sphere_grid(int d, int n) {
  std::vector<DPoint> pts;
  if (d == 1) {
    pts.push_back({1.0, 0, 0});
    pts.push_back({-1.0, 0, 0});
  } else if (d == 2) {
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      double th = 2.0 * kPi * i / n;
      pts.push_back({std::cos(th), std::sin(th), 0});
    }
  } else {
    int m = std::max(8, static_cast<int>(std::sqrt(double(n))));
    for (int a = 1; a < m; ++a) {
      double phi = kPi * a / m;
      for (int b = 0; b < 2 * m; ++b) {
        double th = kPi * b / m;
        pts.push_back({std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th),
                       std::cos(phi)});
      }
    }
  }
  return pts;
}

void sample_bounds(KernelSpec& spec) {
  auto grid = sphere_grid(spec.d, 2048);
  double sup = 0;
  for (const auto& p : grid) sup = std::max(sup, std::abs(spec.omega(p)));
  spec.sup_omega = sup;
  // Finite-difference gradient bound along the sphere.
  double g = 0;
  if (spec.d == 1) {
    g = 0;  // Omega is two point values
  } else {
    const double h = 1e-5;
    for (const auto& p : grid) {
      DPoint t{};
      // any tangent direction
      if (std::abs(p[0]) < 0.9) {
        t = {0 * p[0], -p[2], p[1]};
        if (spec.d == 2) t = {-p[1], p[0], 0};
      } else {
        t = {-p[1], p[0], 0};
      }
      double tn = norm(t, spec.d);
      if (tn == 0) continue;
      DPoint q{};
      double qn = 0;
      for (int i = 0; i < spec.d; ++i) {
        q[i] = p[i] + h * t[i] / tn;
        qn += q[i] * q[i];
      }
      qn = std::sqrt(qn);
      for (int i = 0; i < spec.d; ++i) q[i] /= qn;
      g = std::max(g, std::abs(spec.omega(q) - spec.omega(p)) / h);
    }
  }
  spec.grad_bound = g;
}

}  // namespace

double riesz_constant(int d) { return std::tgamma((d + 1) / 2.0) / std::pow(kPi, (d + 1) / 2.0); }

KernelSpec riesz_kernel(int d, int j) {
  if (j < 1 || j > d) throw SwlError(ErrorCode::Config, "riesz axis out of range");
  KernelSpec k;
  k.d = d;
  k.riesz_axis = j;
  k.kind = d == 1 ? KernelKind::Hilbert : KernelKind::Riesz;
  k.id = d == 1 ? "hilbert" : ("riesz:d=" + std::to_string(d) + ",j=" + std::to_string(j));
  k.is_odd = true;
  k.normalization = riesz_constant(d);
  const double c = k.normalization;
  const int axis = j - 1;
  k.omega = [c, axis](const DPoint& u) { return c * u[axis]; };
  sample_bounds(k);
  return k;
}

KernelSpec kernel_from_id(const std::string& id) {
  if (id == "hilbert") return riesz_kernel(1, 1);
  if (id.rfind("riesz", 0) == 0) {
    int d = 2, j = 1;
    if (id.size() > 5) {
      if (std::sscanf(id.c_str(), "riesz:d=%d,j=%d", &d, &j) != 2)
        throw FormatError("malformed riesz kernel id: " + id);
    }
    return riesz_kernel(d, j);
  }
  KernelSpec k;
  k.kind = KernelKind::Registry;
  k.id = id;
  if (id == "sin3") {
    // Omega(theta) = sin(3 theta): odd, mean zero, not a Riesz transform.
    k.d = 2;
    k.is_odd = true;
    k.omega = [](const DPoint& u) {
      double th = std::atan2(u[1], u[0]);
      return std::sin(3.0 * th);
    };
  } else if (id == "cos2") {
    // Omega(theta) = cos(2 theta): even, mean zero; its sign caps cannot be
    // made coordinate-symmetric, so find_cones rejects it.
    k.d = 2;
    k.is_odd = false;
    k.omega = [](const DPoint& u) {
      double th = std::atan2(u[1], u[0]);
      return std::cos(2.0 * th);
    };
  } else if (id == "const") {
    k.d = 2;
    k.is_odd = false;
    k.omega = [](const DPoint&) { return 1.0; };
  } else {
    throw FormatError("unknown kernel id: " + id);
  }
  sample_bounds(k);
  return k;
}

KernelSpec adjoint_of(const KernelSpec& spec) {
  KernelSpec a = spec;
  a.adjoint = !spec.adjoint;
  auto inner = spec.omega;
  int d = spec.d;
  a.omega = [inner, d](const DPoint& u) {
    DPoint m{};
    for (int i = 0; i < d; ++i) m[i] = -u[i];
    return inner(m);
  };
  return a;
}

double verify_mean_zero(const KernelSpec& spec, double tol) {
  if (tol <= 0) throw SwlError(ErrorCode::Config, "tolerance must be positive");
  if (spec.d == 1) return std::abs(spec.omega({1.0, 0, 0}) + spec.omega({-1.0, 0, 0})) / 2.0;
  if (spec.d == 2) {
    // Composite Gauss on [0, 2pi): 256 panels x 8 nodes.
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    const int panels = 256;
    double sum = 0;
    for (int p = 0; p < panels; ++p) {
      double a = 2 * kPi * p / panels, b = 2 * kPi * (p + 1) / panels;
      double mid = (a + b) / 2, half = (b - a) / 2;
      for (int i = 0; i < 4; ++i) {
        for (double s : {-gx[i], gx[i]}) {
          double th = mid + half * s;
          sum += gw[i] * half * spec.omega({std::cos(th), std::sin(th), 0});
        }
      }
    }
    return std::abs(sum) / (2 * kPi);
  }
  // d == 3: product trapezoid in (phi, theta) with the sin(phi) Jacobian.
  const int m = 512;
  double sum = 0, area = 0;
  for (int a = 0; a < m; ++a) {
    double phi = kPi * (a + 0.5) / m;
    for (int b = 0; b < 2 * m; ++b) {
      double th = kPi * b / m;
      double w = std::sin(phi);
      sum += w * spec.omega({std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th),
                             std::cos(phi)});
      area += w;
    }
  }
  return std::abs(sum / area);
}

ConeData find_cones(const KernelSpec& spec, int grid_resolution) {
  const int d = spec.d;
  const double coord_floor = 0.1 / std::sqrt(double(d));
  auto grid = sphere_grid(d, grid_resolution);

  auto admissible = [&](const DPoint& z) {
    for (int i = 0; i < d; ++i)
      if (std::abs(z[i]) < coord_floor) return false;
    return true;
  };
  auto min_coord = [&](const DPoint& z) {
    double m = 1e300;
    for (int i = 0; i < d; ++i) m = std::min(m, std::abs(z[i]));
    return m;
  };
  auto lex_less = [&](const DPoint& a, const DPoint& b) {
    for (int i = 0; i < d; ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  };

  // Candidate ladder from the spec'd fixed set; lambda = half the cap minimum.
  const double ladder[] = {0.4, 0.3, 0.2, 0.1, 0.05};

  auto cap_extrema = [&](const DPoint& z, double r, double& mn, double& mx) {
    mn = 1e300;
    mx = -1e300;
    bool any = false;
    for (const auto& p : grid) {
      double d2 = 0;
      for (int i = 0; i < d; ++i) d2 += (p[i] - z[i]) * (p[i] - z[i]);
      if (d2 >= r * r) continue;
      double v = spec.omega(p);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      any = true;
    }
    if (!any) {  // at least the center
      double v = spec.omega(z);
      mn = mx = v;
    }
  };

  auto try_pair = [&](const DPoint& zp, const DPoint& zm, ConeData& out) {
    for (double r : ladder) {
      double pmn, pmx, mmn, mmx;
      cap_extrema(zp, r, pmn, pmx);
      cap_extrema(zm, r, mmn, mmx);
      if (pmn > 0 && mmx < 0) {
        out.z_plus = zp;
        out.z_minus = zm;
        out.cap_radius = r;
        out.lambda = 0.5 * std::min(pmn, -mmx);
        for (int i = 0; i < d; ++i)
          out.tau[i] = (zp[i] >= 0) == (zm[i] >= 0) ? 1 : -1;
        return true;
      }
    }
    return false;
  };

  if (spec.is_odd) {
    // Among admissible grid points with Omega within half of the best, prefer
    // the most diagonal one (largest smallest coordinate); ties lexicographic.
    double best = -1e300;
    for (const auto& p : grid)
      if (admissible(p)) best = std::max(best, spec.omega(p));
    if (best <= 0) throw NoConeFoundError("no admissible direction with positive Omega");
    bool have = false;
    DPoint zp{};
    for (const auto& p : grid) {
      if (!admissible(p) || spec.omega(p) < best / 2) continue;
      if (!have || min_coord(p) > min_coord(zp) + 1e-12 ||
          (std::abs(min_coord(p) - min_coord(zp)) <= 1e-12 && lex_less(zp, p))) {
        zp = p;
        have = true;
      }
    }
    DPoint zm{};
    for (int i = 0; i < d; ++i) zm[i] = -zp[i];
    ConeData out{};
    if (try_pair(zp, zm, out)) return out;
    throw NoConeFoundError("sign condition fails on every ladder radius");
  }

  // Non-odd: search over all diagonal reflections tau != I and grid points.
  ConeData best_out{};
  double best_score = -1e300;
  bool found = false;
  for (int mask = 1; mask < (1 << d); ++mask) {
    for (const auto& p : grid) {
      if (!admissible(p) || spec.omega(p) <= 0) continue;
      DPoint q{};
      for (int i = 0; i < d; ++i) q[i] = (mask >> i) & 1 ? -p[i] : p[i];
      if (spec.omega(q) >= 0) continue;
      ConeData out{};
      if (!try_pair(p, q, out)) continue;
      double score = out.cap_radius * 10 + std::min(min_coord(p), min_coord(q));
      if (score > best_score + 1e-12 ||
          (std::abs(score - best_score) <= 1e-12 && lex_less(best_out.z_plus, p))) {
        best_score = score;
        best_out = out;
        found = true;
      }
    }
  }
  if (!found) throw NoConeFoundError("no coordinate-symmetric sign cones found");
  return best_out;
}

double kernel_of_diff(const KernelSpec& spec, const DPoint& diff) {
  const int d = spec.d;
  switch (spec.kind) {
    case KernelKind::Hilbert: {
      // Omega = c sign(u): c/u exactly.
      double u = diff[0];
      if (u == 0) throw SingularPointError("kernel evaluated on the diagonal");
      double c = spec.normalization;
      return spec.adjoint ? -c / u : c / u;
    }
    case KernelKind::Riesz: {
      double r2 = 0;
      for (int i = 0; i < d; ++i) r2 += diff[i] * diff[i];
      if (r2 == 0) throw SingularPointError("kernel evaluated on the diagonal");
      double r = std::sqrt(r2);
      // Omega(u)/|u|^d = c u_j / |u|^(d+1)
      double denom = r;
      for (int i = 0; i < d; ++i) denom *= r;
      double v = spec.normalization * diff[spec.riesz_axis - 1] / denom;
      return spec.adjoint ? -v : v;
    }
    case KernelKind::Registry: {
      double r2 = 0;
      for (int i = 0; i < d; ++i) r2 += diff[i] * diff[i];
      if (r2 == 0) throw SingularPointError("kernel evaluated on the diagonal");
      double r = std::sqrt(r2);
      DPoint u{};
      for (int i = 0; i < d; ++i) u[i] = diff[i] / r;
      double rd = 1;
      for (int i = 0; i < d; ++i) rd *= r;
      return spec.omega(u) / rd;
    }
  }
  return 0;
}

double kernel_value(const KernelSpec& spec, const DPoint& x, const DPoint& y) {
  DPoint diff{};
  for (int i = 0; i < spec.d; ++i) diff[i] = x[i] - y[i];
  return kernel_of_diff(spec, diff);
}

}  // namespace swl
