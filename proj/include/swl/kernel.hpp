#pragma once

#include <functional>
#include <memory>

#include "swl/triadic.hpp"

namespace swl {

enum class KernelKind { Hilbert, Riesz, Registry };

/// Convolution kernel K(x,y) = Omega(x-y)/|x-y|^d with Omega homogeneous of
/// degree 0, C^1 on the sphere and mean zero.
struct KernelSpec {
  int d = 1;
  std::string id;  // registry id, e.g. "hilbert", "riesz:d=2,j=1"
  KernelKind kind = KernelKind::Registry;
  int riesz_axis = 1;  // 1-based j for Riesz kernels
  bool adjoint = false;
  std::function<double(const DPoint&)> omega;  // evaluated on unit vectors
  double smoothness_delta = 1.0;
  double eta = 1.0;  // regularity-regime constant; carried, not used numerically
  double normalization = 1.0;
  bool is_odd = false;
  double sup_omega = 1.0;   // sampled sup |Omega|
  double grad_bound = 1.0;  // sampled sup |Omega'| on the sphere
};

struct ConeData {
  DPoint z_plus{};
  DPoint z_minus{};
  double cap_radius = 0;
  double lambda = 0;
  std::array<int8_t, kMaxDim> tau{};  // diagonal +-1 with z_plus = tau * z_minus
};

/// Classical Riesz constant c_d = Gamma((d+1)/2) / pi^((d+1)/2).
double riesz_constant(int d);

/// Riesz transform kernel R_j; d = 1 is the Hilbert transform.
KernelSpec riesz_kernel(int d, int j);

/// Built-in registry: "hilbert", "riesz:d=<d>,j=<j>", "sin3", "cos2", "const".
KernelSpec kernel_from_id(const std::string& id);

/// K*(x,y) = K(y,x); for odd kernels this is -K.
KernelSpec adjoint_of(const KernelSpec& spec);

/// |sphere average of Omega| by composite quadrature.
double verify_mean_zero(const KernelSpec& spec, double tol);

/// Sign cones (z+, z-, r, lambda, tau). Throws NoConeFoundError when the
/// grid-aligned symmetric reduction fails for this Omega.
ConeData find_cones(const KernelSpec& spec, int grid_resolution = 720);

/// Omega((x-y)/|x-y|) |x-y|^-d. Throws SingularPointError when x == y.
double kernel_value(const KernelSpec& spec, const DPoint& x, const DPoint& y);

/// Same, with the difference vector supplied directly.
double kernel_of_diff(const KernelSpec& spec, const DPoint& diff);

inline DPoint to_dpoint(const RatPoint& p, int dim) {
  DPoint q{};
  for (int i = 0; i < dim; ++i) q[i] = to_double(p[i]);
  return q;
}

}  // namespace swl
