#include "swl/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace swl {

// ---------------------------------------------------------------------------
// maximal lower bound

MaximalEstimate maximal_lower(const WeightTree& tree, const RatPoint& x, int search_depth) {
  const int d = tree.params.d;
  if (search_depth > tree.child_level(tree.params.K))
    throw SwlError(ErrorCode::Config, "search_depth exceeds the built resolution");

  MaximalEstimate est;
  est.x = x;
  est.density_at_x = density_at(tree, x);

  std::vector<RatBox> candidates;
  auto add_box = [&](const RatBox& b) {
    for (int i = 0; i < d; ++i)
      if (x[i] < b.lo[i] || x[i] > b.hi[i]) return;  // must contain x
    candidates.push_back(b);
  };

  for (int m = 0; m <= search_depth; ++m) {
    // The triadic cube through x at level m (clamped into [0,1]^d).
    const BigInt den = pow3_big(m);
    TriadicAddress T;
    T.dim = d;
    T.level = m;
    bool inside = true;
    for (int i = 0; i < d; ++i) {
      if (x[i] < 0 || x[i] >= 1) {
        inside = false;
        break;
      }
      Rational t = x[i] * Rational(den);
      BigInt fl = boost::multiprecision::numerator(t) / boost::multiprecision::denominator(t);
      T.coords[i] = fl.convert_to<int64_t>();
    }
    if (!inside) continue;

    for (int f : {1, 3, 9}) {
      const Rational side = Rational(f, den);
      // concentric dilate of T by factor f
      RatBox dil;
      dil.dim = d;
      for (int i = 0; i < d; ++i) {
        Rational c = (T.lo(i) + T.hi(i)) / 2;
        dil.lo[i] = c - side / 2;
        dil.hi[i] = c + side / 2;
      }
      add_box(dil);
      // offset copies: x at each of the 3^d third positions
      std::array<int, kMaxDim> o{};
      std::function<void(int)> emit = [&](int axis) {
        if (axis == d) {
          RatBox b;
          b.dim = d;
          for (int i = 0; i < d; ++i) {
            b.lo[i] = x[i] - side * Rational(2 * o[i] + 1, 6);
            b.hi[i] = b.lo[i] + side;
          }
          add_box(b);
          return;
        }
        for (o[axis] = 0; o[axis] < 3; ++o[axis]) emit(axis + 1);
      };
      emit(0);
    }
  }

  Rational best(-1);
  RatBox best_box;
  for (const auto& b : candidates) {
    Rational vol = b.volume();
    if (vol == 0) continue;
    Rational avg = mass_in_box(tree, b) / vol;
    if (avg > best) {
      best = avg;
      best_box = b;
    }
  }
  if (best < est.density_at_x) {  // the support cell itself, as a limit
    best = est.density_at_x;
    best_box = RatBox{};
  }
  est.lower = to_double(best);
  est.witness = best_box;
  return est;
}

// ---------------------------------------------------------------------------
// claim certificate

namespace {

// Nonzero-mass cubes at an arbitrary level m = N(k+1): split J-cubes of
// generations < k, the generation-k J-cubes (level exactly m), and the
// T_{k+1} tree cubes (nodes of generation k+1, or the leaves when k = K).
struct LevelCube {
  std::array<int64_t, kMaxDim> c;
  bool tree_cube;
  int j_gen;  // valid when !tree_cube
};

std::vector<LevelCube> nonzero_cubes_at_child_level(const WeightTree& tree, int k) {
  const int d = tree.params.d;
  const int m = tree.child_level(k);
  std::vector<LevelCube> out;
  for (int j = 0; j <= k; ++j) {
    const int jl = tree.child_level(j);
    const int64_t f = pow3_i64(m - jl);
    for (const auto& n : tree.gens[j].nodes) {
      TriadicAddress J = tree.j_of(j, n);
      std::array<int64_t, kMaxDim> base{};
      for (int i = 0; i < d; ++i) base[i] = J.coords[i] * f;
      std::array<int64_t, kMaxDim> off{};
      std::function<void(int)> emit = [&](int axis) {
        if (axis == d) {
          LevelCube lc{{}, false, j};
          for (int i = 0; i < d; ++i) lc.c[i] = base[i] + off[i];
          out.push_back(lc);
          return;
        }
        for (off[axis] = 0; off[axis] < f; ++off[axis]) emit(axis + 1);
      };
      emit(0);
    }
  }
  if (k < tree.params.K) {
    for (const auto& n : tree.gens[k + 1].nodes) out.push_back({n.coords, true, -1});
  } else {
    for (const auto& n : tree.gens[k].nodes)
      for (const auto& c : tree.children_coords(k, n)) out.push_back({c, true, -1});
  }
  return out;
}

}  // namespace

CertificateReport verify_claim21(const WeightTree& tree, int k, uint64_t guard,
                                 const std::function<Rational(const TriadicAddress&)>& mass_fn) {
  if (k < 0 || k > tree.params.K) throw SwlError(ErrorCode::Config, "generation out of range");
  const int d = tree.params.d;
  const int m = tree.child_level(k);
  CertificateReport rep;
  rep.generation = k;
  rep.level = m;
  double total = std::pow(3.0, double(m) * d);
  if (total > double(guard)) throw TooLargeError("claim-21 enumeration exceeds the cube guard");
  rep.total_cubes = uint64_t(total);

  const Rational bound_density = tree.alpha[k];
  const Rational vol(1, pow3_big(m * d));
  const Rational bound = bound_density * vol;

  auto mass_of = [&](const TriadicAddress& L) {
    return mass_fn ? mass_fn(L) : cube_mass(tree, L);
  };

  uint64_t expect_tree = 1;
  for (int i = 0; i <= k; ++i) expect_tree *= uint64_t(tree.A);
  const uint64_t expect_j = expect_tree / uint64_t(tree.A);

  auto cubes = nonzero_cubes_at_child_level(tree, k);
  bool tree_exact = true, j_exact = true;
  for (const auto& lc : cubes) {
    TriadicAddress L;
    L.dim = d;
    L.level = m;
    L.coords = lc.c;
    Rational w = mass_of(L);
    if (w > bound) {
      rep.violations.push_back(L);
      continue;
    }
    rep.nonzero_checked++;
    const bool eq = w == bound;
    if (lc.tree_cube) {
      if (eq)
        rep.equality_tree_cubes++;
      else
        tree_exact = false;  // a tree cube must meet the bound exactly
    } else if (lc.j_gen == k) {
      if (eq)
        rep.equality_j_cubes++;
      else
        j_exact = false;
    } else if (eq) {
      j_exact = false;  // a shallower J piece reaching the bound is wrong
    }
  }
  rep.tree_cube_set_exact = tree_exact && rep.equality_tree_cubes == expect_tree;
  rep.j_cube_set_exact = j_exact && rep.equality_j_cubes == expect_j;
  return rep;
}

double certified_upper(const WeightTree& tree, const RatPoint& x, const CertificateSet& certs) {
  // Locate the support cell (J-cube generation or leaf layer).
  const int d = tree.params.d, K = tree.params.K;
  Rational dens = density_at(tree, x);
  if (dens == 0) throw NotOnSupportError("certified_upper: point not on the support");
  // Covering generation: the generation whose J-cube size matches the cell.
  int gen = K;
  for (int k = 0; k <= K; ++k)
    if (dens == tree.alpha[k]) {
      gen = k;
      break;
    }
  if (!certs.has(gen))
    throw CertificateMissingError("claim-21 certificate missing for generation " +
                                  std::to_string(gen));
  double factor = 1;
  for (int i = 0; i < d; ++i) factor *= 9.0;
  return factor * to_double(dens);
}

// ---------------------------------------------------------------------------
// separation

namespace {

void collect_j_near_box(const WeightTree& tree, const RatBox& box, int k, std::size_t idx,
                        int skip_gen, std::size_t skip_idx,
                        std::vector<std::pair<int, TriadicAddress>>& out) {
  const TreeNode& n = tree.gens[k].nodes[idx];
  TriadicAddress q = tree.node_addr(k, n);
  // prune: node cube vs box
  for (int i = 0; i < q.dim; ++i)
    if (q.hi(i) < box.lo[i] || q.lo(i) > box.hi[i]) return;
  TriadicAddress J = tree.j_of(k, n);
  bool jhit = true;
  for (int i = 0; i < q.dim; ++i)
    if (J.hi(i) < box.lo[i] || J.lo(i) > box.hi[i]) jhit = false;
  if (jhit && !(k == skip_gen && idx == skip_idx)) out.push_back({k, J});
  if (k == tree.params.K) return;
  for (const auto& c : tree.children_coords(k, n)) {
    std::size_t ci = tree.node_index(k + 1, c);
    if (ci != std::size_t(-1)) collect_j_near_box(tree, box, k + 1, ci, skip_gen, skip_idx, out);
  }
}

}  // namespace

SeparationReport verify_separation(const WeightTree& tree) {
  SeparationReport rep;
  rep.min_gap_over_side = Rational(1);
  const int N = tree.params.N;
  const Rational sharp = Rational(1, 3) - Rational(1, pow3_big(N));
  for (int k = 0; k <= tree.params.K; ++k) {
    const Rational side(1, pow3_big(tree.child_level(k)));
    for (std::size_t i = 0; i < tree.gens[k].nodes.size(); ++i) {
      TriadicAddress J = tree.j_of(k, tree.gens[k].nodes[i]);
      RatBox box;
      box.dim = J.dim;
      for (int a = 0; a < J.dim; ++a) {
        box.lo[a] = J.lo(a) - side / 3;
        box.hi[a] = J.hi(a) + side / 3;
      }
      std::vector<std::pair<int, TriadicAddress>> near;
      collect_j_near_box(tree, box, 0, 0, k, i, near);
      for (const auto& [kk, other] : near) {
        if (kk < k) continue;  // handled when the coarser cube was the anchor
        CubeGap gap = min_distance(J, other);
        rep.pairs_checked++;
        Rational rel = gap.linf / side;  // side of the larger (coarser) cube
        if (rel < rep.min_gap_over_side) rep.min_gap_over_side = rel;
        if (rel < Rational(1, 4)) rep.ok = false;
        if (rel < sharp) rep.sharp_ok = false;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// step weights

Rational StepWeight::total() const {
  Rational s(0);
  for (const auto& v : values) s += v;
  return s * h * (d == 2 ? h : Rational(1));
}

Rational StepWeight::mass_in_interval(const Rational& a, const Rational& b) const {
  if (d != 1) throw SwlError(ErrorCode::Config, "1-d only");
  Rational s(0);
  for (int i = 0; i < nx; ++i) {
    Rational lo = origin[0] + h * i, hi = lo + h;
    Rational l = std::max(lo, a, std::less<Rational>());
    Rational r = std::min(hi, b, std::less<Rational>());
    if (r > l) s += values[i] * (r - l);
  }
  return s;
}

double step_maximal(const StepWeight& v, const RatPoint& x) {
  if (v.d == 1) {
    std::vector<Rational> bps;
    for (int i = 0; i <= v.nx; ++i) bps.push_back(v.origin[0] + v.h * i);
    std::vector<Rational> lefts{x[0]}, rights{x[0]};
    for (const auto& b : bps) {
      if (b <= x[0]) lefts.push_back(b);
      if (b >= x[0]) rights.push_back(b);
    }
    Rational best(0);
    // point value: density of the half-open cell containing x
    if (x[0] >= v.origin[0] && x[0] < v.origin[0] + v.h * v.nx) {
      Rational rel = (x[0] - v.origin[0]) / v.h;
      BigInt idx = boost::multiprecision::numerator(rel) / boost::multiprecision::denominator(rel);
      best = v.values[idx.convert_to<int>()];
    }
    for (const auto& l : lefts)
      for (const auto& r : rights) {
        if (r <= l) continue;
        Rational avg = v.mass_in_interval(l, r) / (r - l);
        if (avg > best) best = avg;
      }
    return to_double(best);
  }
  if (v.d != 2) throw SwlError(ErrorCode::Config, "step_maximal: d in {1,2}");
  // Lower bound via grid-cornered squares containing x.
  std::vector<std::vector<Rational>> pref(v.ny + 1, std::vector<Rational>(v.nx + 1, Rational(0)));
  for (int j = 0; j < v.ny; ++j)
    for (int i = 0; i < v.nx; ++i)
      pref[j + 1][i + 1] = pref[j][i + 1] + pref[j + 1][i] - pref[j][i] + v.value(i, j);
  auto cellsum = [&](int i0, int j0, int i1, int j1) -> Rational {  // [i0,i1) x [j0,j1)
    i0 = std::max(i0, 0);
    j0 = std::max(j0, 0);
    i1 = std::min(i1, v.nx);
    j1 = std::min(j1, v.ny);
    if (i1 <= i0 || j1 <= j0) return Rational(0);
    return Rational(pref[j1][i1] - pref[j0][i1] - pref[j1][i0] + pref[j0][i0]);
  };
  Rational best(0);
  // point value
  if (x[0] >= v.origin[0] && x[0] < v.origin[0] + v.h * v.nx && x[1] >= v.origin[1] &&
      x[1] < v.origin[1] + v.h * v.ny) {
    Rational rx = (x[0] - v.origin[0]) / v.h, ry = (x[1] - v.origin[1]) / v.h;
    BigInt ix = boost::multiprecision::numerator(rx) / boost::multiprecision::denominator(rx);
    BigInt iy = boost::multiprecision::numerator(ry) / boost::multiprecision::denominator(ry);
    best = v.value(ix.convert_to<int>(), iy.convert_to<int>());
  }
  for (int s = 1; s <= std::max(v.nx, v.ny); ++s) {
    for (int i = -s; i <= v.nx; ++i) {
      Rational lx = v.origin[0] + v.h * i, hx = lx + v.h * s;
      if (x[0] < lx || x[0] > hx) continue;
      for (int j = -s; j <= v.ny; ++j) {
        Rational ly = v.origin[1] + v.h * j, hy = ly + v.h * s;
        if (x[1] < ly || x[1] > hy) continue;
        Rational mass = cellsum(i, j, i + s, j + s) * v.h * v.h;
        Rational avg = mass / (v.h * s * v.h * s);
        if (avg > best) best = avg;
      }
    }
  }
  return to_double(best);
}

std::pair<double, double> sv_bound_check(const StepWeight& v, const std::vector<int>& cells_E) {
  if (v.d != 1) throw SwlError(ErrorCode::Config, "sv_bound_check: d = 1 only");
  StepWeight masked = v;
  std::vector<bool> in_e(v.values.size(), false);
  for (int i : cells_E) in_e.at(i) = true;
  for (std::size_t i = 0; i < masked.values.size(); ++i)
    if (!in_e[i]) masked.values[i] = 0;

  Rational vE(0);
  for (int i : cells_E) vE += v.values[i] * v.h;

  double lhs2 = 0;
  for (int i = 0; i < v.nx; ++i) {
    if (v.values[i] == 0) continue;
    RatPoint mid{};
    mid[0] = v.origin[0] + v.h * i + v.h / 2;
    const double num = step_maximal(masked, mid);
    const double den = step_maximal(v, mid);
    const double ratio = den == 0 ? 0 : num / den;
    lhs2 += ratio * ratio * to_double(v.values[i] * v.h);
  }
  return {std::sqrt(lhs2), std::sqrt(to_double(vE))};
}

}  // namespace swl
