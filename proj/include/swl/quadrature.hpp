#pragma once

#include "swl/kernel.hpp"

namespace swl {

struct QuadResult {
  double value = 0;
  double error_estimate = 0;
};

/// Axis-aligned box with double endpoints (exact for triadic cells converted
/// once from rationals; quadrature is floating point anyway).
struct DBox {
  int dim = 1;
  DPoint lo{};
  DPoint hi{};
};

DBox to_dbox(const TriadicAddress& a);

/// Integral of K(x, .) over the box by adaptive tensor Gauss-Legendre.
/// Requires x outside the closed box or at distance >= side/10.
QuadResult cube_integral(const KernelSpec& spec, const DPoint& x, const DBox& cube,
                         double rel_tol = 1e-9);
QuadResult cube_integral(const KernelSpec& spec, const DPoint& x, const TriadicAddress& cube,
                         double rel_tol = 1e-9);

/// Integral of K(x, .) over cube minus the ball E = B(x, side/3); the
/// principal value over E vanishes by the mean-zero property. Requires the
/// ball inside the cube (x in the middle child).
double pv_self_integral(const KernelSpec& spec, const DPoint& x, const TriadicAddress& cube);

/// p.v. integral of K(x, .) over a box containing x in its interior
/// (rho-independent closed form in d=1, polar quadrature in d=2).
double pv_box_interior(const KernelSpec& spec, const DPoint& x, const DBox& box);

/// Plain midpoint rule with n points per axis (test oracle support).
double midpoint_rule(const KernelSpec& spec, const DPoint& x, const DBox& cube, int n);

}  // namespace swl
