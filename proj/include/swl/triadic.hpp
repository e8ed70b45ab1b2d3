#pragma once

#include <optional>

#include "swl/common.hpp"

namespace swl {

/// A triadic cube of side 3^-level with lattice coordinates in [0, 3^level)^d.
/// Coordinates are exact integers; no floating point enters the geometry.
struct TriadicAddress {
  int dim = 1;
  int level = 0;
  std::array<int64_t, kMaxDim> coords{};

  bool operator==(const TriadicAddress& o) const {
    if (dim != o.dim || level != o.level) return false;
    for (int i = 0; i < dim; ++i)
      if (coords[i] != o.coords[i]) return false;
    return true;
  }
  bool operator<(const TriadicAddress& o) const {  // level-major, then lexicographic
    if (level != o.level) return level < o.level;
    for (int i = 0; i < dim; ++i)
      if (coords[i] != o.coords[i]) return coords[i] < o.coords[i];
    return false;
  }

  Rational side() const { return Rational(1, pow3_big(level)); }
  Rational volume() const { return Rational(1, pow3_big(level * dim)); }
  Rational lo(int axis) const { return Rational(coords[axis], pow3_big(level)); }
  Rational hi(int axis) const { return Rational(coords[axis] + 1, pow3_big(level)); }
  RatPoint center() const;

  /// Ancestor at a coarser level (integer division of coordinates).
  TriadicAddress ancestor(int coarser_level) const;
  bool contains(const TriadicAddress& finer) const;
  /// Half-open containment [lo, lo+side) per axis.
  bool contains_point(const RatPoint& x) const;
};

TriadicAddress make_address(int dim, int level, std::initializer_list<int64_t> cs);
TriadicAddress root_cube(int dim);

/// d-tuple of +-1 selecting a corner of a cube.
struct SignVector {
  int dim = 1;
  std::array<int8_t, kMaxDim> s{};

  bool operator==(const SignVector& o) const {
    if (dim != o.dim) return false;
    for (int i = 0; i < dim; ++i)
      if (s[i] != o.s[i]) return false;
    return true;
  }
  SignVector flipped() const {
    SignVector r = *this;
    for (int i = 0; i < dim; ++i) r.s[i] = -r.s[i];
    return r;
  }
};

SignVector make_signs(std::initializer_list<int> ss);

/// Corner of the cube selected by sigma (+1 -> upper face coordinate).
RatPoint corner(const TriadicAddress& q, const SignVector& sigma);

/// Open cone {t u : t>0, |u/|u| - axis| < r} translated to apex.
struct Cone {
  RatPoint apex{};
  DPoint axis{};  // unit vector
  double cap_radius = 0;
  int dim = 1;
};

/// Closed middle-third child Q(c_Q, side/3): level+1, coords 3k+1.
TriadicAddress middle_child(const TriadicAddress& addr);

/// The diagonal outside-corner cube of side 3^-target_level touching hatQ
/// exactly at corner(hatQ, sigma), lying inside hatQ's parent cube.
/// Throws OutOfParentError if it would leave the parent.
TriadicAddress j_cube(const TriadicAddress& hatQ, const SignVector& sigma, int target_level);

/// Triadic subcubes of hatQ at child_level whose centers lie in the open cone.
/// Lexicographic order. Throws EmptySelectionError when none qualify.
std::vector<TriadicAddress> cone_children(const TriadicAddress& hatQ, const Cone& cone,
                                          int child_level);

struct CubeGap {
  Rational linf;        // exact L-infinity gap between the closed cubes
  Rational l2_squared;  // exact squared Euclidean gap
};

/// Exact gap between closed cubes; zero when they intersect.
CubeGap min_distance(const TriadicAddress& a, const TriadicAddress& b);

/// Membership test used by cone_children, exposed for property tests:
/// relative child offsets m in [0, 3^(levels))^d against the per-axis
/// absolute-value axis (the sigma-reduced form, identical at every node).
bool cone_offset_selected(const std::array<int64_t, kMaxDim>& m, int dim,
                          const DPoint& abs_axis, double cap_radius);

}  // namespace swl
