#include "swl/weight.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "swl/simd.hpp"
#include "swl/treesum.hpp"

namespace swl {
namespace {

Rational alpha_of(const WeightTree& t, int g) {
  if (g < 0) return Rational(1);
  return t.alpha.at(g);
}

// Tail mass factor of a generation-k subtree: 1 under LeafUniform, the
// dropped-tail geometric factor under DropTail.
Rational tail_factor(const WeightTree& t, int k) {
  if (t.params.truncation == Truncation::LeafUniform) return Rational(1);
  const Rational q(BigInt(t.A), BigInt(t.A) + 1);
  Rational qe(1);
  for (int i = 0; i < t.params.K - k + 1; ++i) qe *= q;
  return Rational(1) - qe;
}

}  // namespace

namespace detail {

int8_t branch_of(const TreeNode& n, TieBreak tb) {
  if (n.i1_sign != 0) return n.i1_sign;
  return tb == TieBreak::Positive ? int8_t(1) : int8_t(-1);
}

uint8_t sigma_mask_for_branch(const ConeData& cones, int d, int8_t branch) {
  const DPoint& z = branch > 0 ? cones.z_plus : cones.z_minus;
  uint8_t m = 0;
  for (int i = 0; i < d; ++i)
    if (z[i] > 0) m |= uint8_t(1u << i);
  return m;
}

}  // namespace detail

using detail::branch_of;
using detail::sigma_mask_for_branch;

SignVector WeightTree::sigma_of(const TreeNode& n) const {
  SignVector s;
  s.dim = params.d;
  for (int i = 0; i < params.d; ++i) s.s[i] = (n.sigma_mask >> i) & 1 ? 1 : -1;
  return s;
}

TriadicAddress WeightTree::node_addr(int k, const TreeNode& n) const {
  TriadicAddress a;
  a.dim = params.d;
  a.level = node_level(k);
  a.coords = n.coords;
  return a;
}

TriadicAddress WeightTree::hat_of(int k, const TreeNode& n) const {
  return middle_child(node_addr(k, n));
}

TriadicAddress WeightTree::j_of(int k, const TreeNode& n) const {
  return j_cube(hat_of(k, n), sigma_of(n), child_level(k));
}

RatPoint WeightTree::vertex_of(int k, const TreeNode& n) const {
  return corner(hat_of(k, n), sigma_of(n));
}

std::array<int64_t, kMaxDim> WeightTree::child_coord(
    int k, const TreeNode& n, const std::array<int64_t, kMaxDim>& m) const {
  const int64_t f = pow3_i64(params.N - 1);
  std::array<int64_t, kMaxDim> c{};
  for (int i = 0; i < params.d; ++i) {
    const int64_t hat = 3 * n.coords[i] + 1;
    const bool plus = (n.sigma_mask >> i) & 1;
    const int64_t v = (hat + (plus ? 1 : 0)) * f;
    c[i] = plus ? v - 1 - m[i] : v + m[i];
  }
  return c;
}

std::vector<std::array<int64_t, kMaxDim>> WeightTree::children_coords(int k,
                                                                      const TreeNode& n) const {
  std::vector<std::array<int64_t, kMaxDim>> out;
  out.reserve(child_offsets.size());
  for (const auto& m : child_offsets) out.push_back(child_coord(k, n, m));
  auto lex = [this](const auto& a, const auto& b) {
    for (int i = 0; i < params.d; ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  };
  std::sort(out.begin(), out.end(), lex);
  return out;
}

const TreeNode* WeightTree::find_node(int k, const std::array<int64_t, kMaxDim>& coords) const {
  std::size_t i = node_index(k, coords);
  return i == std::size_t(-1) ? nullptr : &gens[k].nodes[i];
}

std::size_t WeightTree::node_index(int k, const std::array<int64_t, kMaxDim>& coords) const {
  const auto& v = gens.at(k).nodes;
  const int d = params.d;
  auto lex = [d](const TreeNode& n, const std::array<int64_t, kMaxDim>& c) {
    for (int i = 0; i < d; ++i)
      if (n.coords[i] != c[i]) return n.coords[i] < c[i];
    return false;
  };
  auto it = std::lower_bound(v.begin(), v.end(), coords, lex);
  if (it == v.end() || it->coords != coords) return std::size_t(-1);
  return std::size_t(it - v.begin());
}

Rational WeightTree::node_cube_mass(int k) const {
  Rational m = alpha_of(*this, k - 1) / Rational(pow3_big(node_level(k) * params.d));
  return m * tail_factor(*this, k);
}

Rational WeightTree::leaf_density() const { return alpha.at(params.K); }

uint64_t WeightTree::node_count() const {
  uint64_t n = 0;
  for (const auto& g : gens) n += g.nodes.size();
  return n;
}

Rational RatBox::volume() const {
  Rational v(1);
  for (int i = 0; i < dim; ++i) {
    if (hi[i] <= lo[i]) return Rational(0);
    v *= hi[i] - lo[i];
  }
  return v;
}

// ---------------------------------------------------------------------------
// level mass table

Rational LevelMassTable::alpha_of_gen(const WeightTree& tree, int g) const {
  return alpha_of(tree, g);
}

LevelMassTable level_mass_table(const WeightTree& tree, int k) {
  const int d = tree.params.d;
  const int level = tree.node_level(k);
  struct Row {
    std::array<int64_t, kMaxDim> c;
    int g;
    bool tree_cube;
  };
  std::vector<Row> rows;

  // J-cubes of shallower generations, split down to this level.
  for (int j = 0; j + 1 <= k; ++j) {
    const int jl = tree.child_level(j);  // level of generation-j J-cubes
    const int64_t f = pow3_i64(level - jl);
    for (const auto& n : tree.gens[j].nodes) {
      TriadicAddress J = tree.j_of(j, n);
      std::array<int64_t, kMaxDim> base{};
      for (int i = 0; i < d; ++i) base[i] = J.coords[i] * f;
      std::array<int64_t, kMaxDim> off{};
      std::function<void(int)> emit = [&](int axis) {
        if (axis == d) {
          Row r{{}, j, false};
          for (int i = 0; i < d; ++i) r.c[i] = base[i] + off[i];
          rows.push_back(r);
          return;
        }
        for (off[axis] = 0; off[axis] < f; ++off[axis]) emit(axis + 1);
      };
      emit(0);
    }
  }
  // The generation-k tree cubes themselves.
  for (const auto& n : tree.gens[k].nodes) rows.push_back({n.coords, k - 1, true});

  std::sort(rows.begin(), rows.end(), [d](const Row& a, const Row& b) {
    for (int i = 0; i < d; ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  });

  LevelMassTable t;
  t.level = level;
  t.dim = d;
  const std::size_t n = rows.size();
  t.coords.resize(n);
  t.alpha_gen.resize(n);
  t.mass.resize(n);
  t.c0.resize(n);
  if (d >= 2) t.c1.resize(n);
  if (d >= 3) t.c2.resize(n);
  const Rational vol(1, pow3_big(level * d));
  for (std::size_t i = 0; i < n; ++i) {
    t.coords[i] = rows[i].c;
    t.alpha_gen[i] = rows[i].g;
    Rational m = alpha_of(tree, rows[i].g) * vol;
    if (rows[i].tree_cube) m *= tail_factor(tree, k);
    t.mass[i] = to_double(m);
    t.c0[i] = static_cast<double>(rows[i].c[0]) + 0.5;
    if (d >= 2) t.c1[i] = static_cast<double>(rows[i].c[1]) + 0.5;
    if (d >= 3) t.c2[i] = static_cast<double>(rows[i].c[2]) + 0.5;
  }
  return t;
}

// ---------------------------------------------------------------------------
// I1 discrete sums

namespace {

std::size_t table_index_of(const LevelMassTable& t, const std::array<int64_t, kMaxDim>& c) {
  auto lex = [&t](const std::array<int64_t, kMaxDim>& a, const std::array<int64_t, kMaxDim>& b) {
    for (int i = 0; i < t.dim; ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  };
  auto it = std::lower_bound(t.coords.begin(), t.coords.end(), c, lex);
  if (it == t.coords.end() || *it != c) return std::size_t(-1);
  return std::size_t(it - t.coords.begin());
}

// Direct reference sum in lattice units, excluding entry `self`.
void i1_direct(const KernelSpec& spec, const LevelMassTable& t, std::size_t self, double xc0,
               double xc1, double xc2, double* out, double* out_abs) {
  const std::size_t n = t.coords.size();
  double val = 0, av = 0;
  if (spec.kind == KernelKind::Hilbert) {
    const double c_eff = kernel_of_diff(spec, {1.0, 0, 0});
    double s = 0, sa = 0;
    s += simd::sum_reciprocal(t.c0.data(), t.mass.data(), self, xc0);
    sa += simd::sum_abs_reciprocal(t.c0.data(), t.mass.data(), self, xc0);
    if (self + 1 < n) {
      s += simd::sum_reciprocal(t.c0.data() + self + 1, t.mass.data() + self + 1, n - self - 1,
                                xc0);
      sa += simd::sum_abs_reciprocal(t.c0.data() + self + 1, t.mass.data() + self + 1,
                                     n - self - 1, xc0);
    }
    const double scale = std::pow(3.0, t.level);
    val = c_eff * scale * s;
    av = std::abs(c_eff) * scale * sa;
  } else if (spec.kind == KernelKind::Riesz && spec.d == 2) {
    const int axis = spec.riesz_axis - 1;
    const double c_eff = (spec.adjoint ? -1.0 : 1.0) * spec.normalization;
    double s0, a0, s1 = 0, a1 = 0;
    simd::sum_riesz2_with_abs(t.c0.data(), t.c1.data(), t.mass.data(), self, xc0, xc1, axis, &s0,
                              &a0);
    if (self + 1 < n)
      simd::sum_riesz2_with_abs(t.c0.data() + self + 1, t.c1.data() + self + 1,
                                t.mass.data() + self + 1, n - self - 1, xc0, xc1, axis, &s1, &a1);
    const double scale = std::pow(3.0, 2.0 * t.level);
    val = c_eff * scale * (s0 + s1);
    av = std::abs(c_eff) * scale * (a0 + a1);
  } else {
    // Generic kernel: per-entry evaluation with exact lattice differences.
    const int d = spec.d;
    const double unit = std::pow(3.0, -t.level);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == self) continue;
      DPoint diff{};
      diff[0] = (xc0 - t.c0[i]) * unit;
      if (d >= 2) diff[1] = (xc1 - t.c1[i]) * unit;
      if (d >= 3) diff[2] = (xc2 - t.c2[i]) * unit;
      const double kv = kernel_of_diff(spec, diff);
      val += kv * t.mass[i];
      av += std::abs(kv) * t.mass[i];
    }
  }
  *out = val;
  *out_abs = av;
}

}  // namespace

double i1_discrete(const WeightTree& tree, int k, const TreeNode& n, const LevelMassTable& table,
                   double* abs_scale) {
  const std::size_t self = table_index_of(table, n.coords);
  if (self == std::size_t(-1)) throw SwlError(ErrorCode::InvariantViolation, "node not in table");
  double val, av;
  const double x0 = static_cast<double>(n.coords[0]) + 0.5;
  const double x1 = tree.params.d >= 2 ? static_cast<double>(n.coords[1]) + 0.5 : 0;
  const double x2 = tree.params.d >= 3 ? static_cast<double>(n.coords[2]) + 0.5 : 0;
  i1_direct(tree.params.kernel, table, self, x0, x1, x2, &val, &av);
  if (abs_scale) *abs_scale = av;
  return val;
}

double i1_discrete(const WeightTree& tree, int k, const TreeNode& n) {
  LevelMassTable t = level_mass_table(tree, k);
  return i1_discrete(tree, k, n, t, nullptr);
}

// ---------------------------------------------------------------------------
// build

WeightTree build(const BuildParams& params) {
  const int d = params.d, N = params.N, K = params.K;
  if (d < 1 || d > kMaxDim) throw SwlError(ErrorCode::Config, "d out of range");
  if (N < 2) throw SwlError(ErrorCode::Config, "N must be >= 2");
  if (K < 0) throw SwlError(ErrorCode::Config, "K must be >= 0");
  if (N * (K + 1) > kMaxLevel) throw TooDeepError("N(K+1) exceeds the lattice range");
  if (params.kernel.d != d) throw SwlError(ErrorCode::Config, "kernel dimension mismatch");
  if (params.selection == ChildSelection::FullCone &&
      !(params.kernel.kind == KernelKind::Hilbert || params.kernel.kind == KernelKind::Riesz))
    throw SwlError(ErrorCode::Config, "full-cone selection is the Riesz/Hilbert special case");
  for (int i = 0; i < d; ++i) {
    if (params.cones.z_plus[i] == 0 || params.cones.z_minus[i] == 0)
      throw SwlError(ErrorCode::Config, "cone directions must have nonzero coordinates");
    if (std::abs(std::abs(params.cones.z_plus[i]) - std::abs(params.cones.z_minus[i])) > 1e-9)
      throw SwlError(ErrorCode::Config, "cone directions are not coordinate-symmetric");
  }

  WeightTree t;
  t.params = params;

  // Selected child offsets, identical at every node and for both branches.
  const int64_t f = pow3_i64(N - 1);
  DPoint abs_axis{};
  for (int i = 0; i < d; ++i) abs_axis[i] = std::abs(params.cones.z_plus[i]);
  {
    std::array<int64_t, kMaxDim> m{};
    std::function<void(int)> emit = [&](int axis) {
      if (axis == d) {
        if (params.selection == ChildSelection::FullCone ||
            cone_offset_selected(m, d, abs_axis, params.cones.cap_radius))
          t.child_offsets.push_back(m);
        return;
      }
      for (m[axis] = 0; m[axis] < f; ++m[axis]) emit(axis + 1);
    };
    emit(0);
  }
  if (t.child_offsets.empty())
    throw ConeTooNarrowError("no child centers in the cone; increase N or the cap radius");
  t.A = static_cast<int64_t>(t.child_offsets.size());

  t.a = Rational(pow3_big(N * d), BigInt(t.A) + 1);
  if (t.a <= 1) throw ConeTooNarrowError("density ratio a <= 1");
  t.alpha.resize(K + 1);
  Rational acc = t.a;
  for (int k = 0; k <= K; ++k) {
    t.alpha[k] = acc;
    acc *= t.a;
  }

  t.gens.resize(K + 1);
  t.gens[0].nodes.push_back(TreeNode{});

  auto lex = [d](const TreeNode& a, const TreeNode& b) {
    for (int i = 0; i < d; ++i)
      if (a.coords[i] != b.coords[i]) return a.coords[i] < b.coords[i];
    return false;
  };

  for (int k = 0; k <= K; ++k) {
    if (k > 0) {
      // Children of the previous generation become this generation's nodes.
      auto& prev = t.gens[k - 1].nodes;
      auto& cur = t.gens[k].nodes;
      cur.reserve(prev.size() * t.child_offsets.size());
      for (const auto& p : prev) {
        for (const auto& m : t.child_offsets) {
          TreeNode c;
          c.coords = t.child_coord(k - 1, p, m);
          cur.push_back(c);
        }
      }
      std::sort(cur.begin(), cur.end(), lex);
    }

    auto& nodes = t.gens[k].nodes;
    if (k == 0) {
      // No same-size siblings inside the unit cube: I1 is the empty sum.
      nodes[0].i1 = 0;
      nodes[0].i1_sign = 0;
      nodes[0].sigma_mask =
          sigma_mask_for_branch(params.cones, d, branch_of(nodes[0], params.tie_break));
      continue;
    }

    const LevelMassTable table = level_mass_table(t, k);
    const std::size_t nn = nodes.size(), ns = table.coords.size();

    bool hierarchical = false;
    if (params.i1_path == I1Path::Hierarchical)
      hierarchical = true;
    else if (params.i1_path == I1Path::Auto)
      hierarchical = d == 1 && double(nn) * double(ns) > 2e8;
    if (hierarchical && d != 1)
      throw SwlError(ErrorCode::Config, "hierarchical I1 path is 1-d only");

    const double c_eff = d == 1 ? kernel_of_diff(params.kernel, {1.0, 0, 0}) : 0;
    const double scale = std::pow(3.0, double(table.level) * (d == 1 ? 1.0 : double(d)));

    std::unique_ptr<LatticePointSum> lattice;
    if (hierarchical) {
      std::vector<int64_t> cs(ns);
      for (std::size_t i = 0; i < ns; ++i) cs[i] = table.coords[i][0];
      lattice = std::make_unique<LatticePointSum>(table.level, std::move(cs),
                                                  std::vector<double>(table.mass));
    }

    parallel_for(nn, params.threads, [&](std::size_t i) {
      TreeNode& n = nodes[i];
      double val, av;
      if (hierarchical) {
        auto r = lattice->evaluate(static_cast<double>(n.coords[0]) + 0.5, n.coords[0]);
        val = c_eff * scale * r.value;
        av = std::abs(c_eff) * scale * r.abs_value;
        const double err = std::abs(c_eff) * scale * r.err_bound;
        if (std::abs(val) <= std::max(params.tie_eps * av, 2 * err)) {
          // Sign not certified by the far-field bound: exact fallback.
          val = i1_discrete(t, k, n, table, &av);
        }
      } else {
        val = i1_discrete(t, k, n, table, &av);
      }
      n.i1 = val;
      n.i1_sign = std::abs(val) < params.tie_eps * av ? 0 : (val > 0 ? 1 : -1);
      n.sigma_mask = sigma_mask_for_branch(params.cones, d, branch_of(n, params.tie_break));
    });
  }

  // Exact total mass: the J-cube geometric series plus the leaf layer.
  Rational jm(0);
  for (int k = 0; k <= K; ++k) {
    Rational cnt(1);
    for (int i = 0; i < k; ++i) cnt *= t.A;
    jm += cnt * t.alpha[k] / Rational(pow3_big(N * d * (k + 1)));
  }
  t.total_mass = jm;
  if (params.truncation == Truncation::LeafUniform) {
    Rational cnt(1);
    for (int i = 0; i < K + 1; ++i) cnt *= t.A;
    t.total_mass += cnt * t.alpha[K] / Rational(pow3_big(N * d * (K + 1)));
    if (t.total_mass != 1)
      throw SwlError(ErrorCode::InvariantViolation, "total mass identity failed");
  }
  return t;
}

// ---------------------------------------------------------------------------
// structure resolution, masses, densities

CubeContent resolve_cube(const WeightTree& tree, const TriadicAddress& B) {
  const int d = tree.params.d, N = tree.params.N, K = tree.params.K;
  if (B.dim != d) throw SwlError(ErrorCode::Config, "dimension mismatch");
  CubeContent out;

  int k = 0;
  std::size_t idx = 0;
  // Invariant: B is contained in the current node cube.
  if (B.level == 0) {
    out.kind = CubeContent::NodeCube;
    out.gen = 0;
    out.node = 0;
    return out;
  }
  for (;;) {
    const TreeNode& n = tree.gens[k].nodes[idx];
    const int nl = tree.node_level(k), cl = tree.child_level(k);
    if (B.level == nl) {
      out.kind = CubeContent::NodeCube;
      out.gen = k;
      out.node = idx;
      return out;
    }
    // Strictly inside the node cube now.
    TriadicAddress J = tree.j_of(k, n);
    if (B.level >= J.level && J.contains(B)) {
      out.kind = CubeContent::Uniform;
      out.density = tree.alpha[k];
      return out;
    }
    TriadicAddress hat = tree.hat_of(k, n);
    const bool in_hat = B.level >= hat.level && hat.contains(B);
    if (!in_hat) {
      // Inside the frame Q minus hatQ: only J(Q) lives there.
      if (B.level < J.level && B.contains(J)) {
        out.kind = CubeContent::Mixed;
        out.gen = k;
        out.node = idx;
        return out;
      }
      out.kind = CubeContent::Outside;
      return out;
    }
    if (B.level < cl) {  // a block of the child region
      out.kind = CubeContent::Mixed;
      out.gen = k;
      out.node = idx;
      return out;
    }
    // Descend into the child containing B.
    TriadicAddress anc = B.ancestor(cl);
    if (tree.params.selection == ChildSelection::CapCone) {
      // Child membership is not automatic for cap cones.
      bool is_child = false;
      for (const auto& m : tree.child_offsets) {
        if (tree.child_coord(k, n, m) == anc.coords) {
          is_child = true;
          break;
        }
      }
      if (!is_child) {
        out.kind = CubeContent::Outside;
        return out;
      }
    }
    if (k == K) {
      if (tree.params.truncation == Truncation::LeafUniform) {
        out.kind = CubeContent::Uniform;
        out.density = tree.alpha[K];
        return out;
      }
      if (B.level > cl) throw TooDeepError("query below the DropTail truncation");
      out.kind = CubeContent::Outside;  // T_{K+1} cubes carry no mass when dropped
      return out;
    }
    idx = tree.node_index(k + 1, anc.coords);
    if (idx == std::size_t(-1))
      throw SwlError(ErrorCode::InvariantViolation, "child node missing from table");
    k += 1;
  }
}

Rational cube_mass(const WeightTree& tree, const TriadicAddress& L) {
  CubeContent c = resolve_cube(tree, L);
  switch (c.kind) {
    case CubeContent::Outside:
      return Rational(0);
    case CubeContent::Uniform:
      return c.density * L.volume();
    case CubeContent::NodeCube:
      return tree.node_cube_mass(c.gen);
    case CubeContent::Mixed:
      break;
  }
  // Split into the 3^d triadic children and recurse.
  Rational sum(0);
  std::array<int64_t, kMaxDim> off{};
  const int d = L.dim;
  std::function<void(int)> emit = [&](int axis) {
    if (axis == d) {
      TriadicAddress ch;
      ch.dim = d;
      ch.level = L.level + 1;
      for (int i = 0; i < d; ++i) ch.coords[i] = 3 * L.coords[i] + off[i];
      sum += cube_mass(tree, ch);
      return;
    }
    for (off[axis] = 0; off[axis] < 3; ++off[axis]) emit(axis + 1);
  };
  emit(0);
  return sum;
}

Rational density_at(const WeightTree& tree, const RatPoint& x) {
  const int d = tree.params.d, K = tree.params.K;
  for (int i = 0; i < d; ++i)
    if (x[i] < 0 || x[i] >= 1) return Rational(0);
  int k = 0;
  std::size_t idx = 0;
  for (;;) {
    const TreeNode& n = tree.gens[k].nodes[idx];
    TriadicAddress J = tree.j_of(k, n);
    if (J.contains_point(x)) return tree.alpha[k];
    TriadicAddress hat = tree.hat_of(k, n);
    if (!hat.contains_point(x)) return Rational(0);
    // Locate the child cell containing x (half-open resolution).
    const int cl = tree.child_level(k);
    TriadicAddress cell;
    cell.dim = d;
    cell.level = cl;
    const BigInt den = pow3_big(cl);
    for (int i = 0; i < d; ++i) {
      // floor(x_i * 3^cl)
      Rational t = x[i] * Rational(den);
      BigInt fl = boost::multiprecision::numerator(t) / boost::multiprecision::denominator(t);
      cell.coords[i] = fl.convert_to<int64_t>();
    }
    if (tree.params.selection == ChildSelection::CapCone) {
      bool is_child = false;
      for (const auto& m : tree.child_offsets)
        if (tree.child_coord(k, n, m) == cell.coords) {
          is_child = true;
          break;
        }
      if (!is_child) return Rational(0);
    }
    if (k == K)
      return tree.params.truncation == Truncation::LeafUniform ? tree.alpha[K] : Rational(0);
    idx = tree.node_index(k + 1, cell.coords);
    if (idx == std::size_t(-1))
      throw SwlError(ErrorCode::InvariantViolation, "child node missing from table");
    k += 1;
  }
}

namespace {

Rational box_cube_overlap(const RatBox& box, const TriadicAddress& c) {
  Rational v(1);
  for (int i = 0; i < c.dim; ++i) {
    Rational lo = std::max(box.lo[i], c.lo(i), std::less<Rational>());
    Rational hi = std::min(box.hi[i], c.hi(i), std::less<Rational>());
    if (hi <= lo) return Rational(0);
    v *= hi - lo;
  }
  return v;
}

bool box_contains_cube(const RatBox& box, const TriadicAddress& c) {
  for (int i = 0; i < c.dim; ++i)
    if (box.lo[i] > c.lo(i) || box.hi[i] < c.hi(i)) return false;
  return true;
}

Rational mass_in_box_rec(const WeightTree& tree, const RatBox& box, const TriadicAddress& c) {
  Rational overlap = box_cube_overlap(box, c);
  if (overlap == 0) return Rational(0);
  CubeContent cc = resolve_cube(tree, c);
  if (cc.kind == CubeContent::Outside) return Rational(0);
  if (cc.kind == CubeContent::Uniform) return cc.density * overlap;
  if (box_contains_cube(box, c)) return cube_mass(tree, c);
  Rational sum(0);
  std::array<int64_t, kMaxDim> off{};
  const int d = c.dim;
  std::function<void(int)> emit = [&](int axis) {
    if (axis == d) {
      TriadicAddress ch;
      ch.dim = d;
      ch.level = c.level + 1;
      for (int i = 0; i < d; ++i) ch.coords[i] = 3 * c.coords[i] + off[i];
      sum += mass_in_box_rec(tree, box, ch);
      return;
    }
    for (off[axis] = 0; off[axis] < 3; ++off[axis]) emit(axis + 1);
  };
  emit(0);
  return sum;
}

}  // namespace

Rational mass_in_box(const WeightTree& tree, const RatBox& box) {
  return mass_in_box_rec(tree, box, root_cube(tree.params.d));
}

// ---------------------------------------------------------------------------
// support cells

void for_each_support_cell(const WeightTree& tree,
                           const std::function<void(const SupportCell&)>& fn) {
  const int K = tree.params.K;
  for (int k = 0; k <= K; ++k)
    for (const auto& n : tree.gens[k].nodes) fn(SupportCell{tree.j_of(k, n), tree.alpha[k]});
  if (tree.params.truncation == Truncation::LeafUniform) {
    const int cl = tree.child_level(K);
    for (const auto& n : tree.gens[K].nodes) {
      for (const auto& c : tree.children_coords(K, n)) {
        TriadicAddress a;
        a.dim = tree.params.d;
        a.level = cl;
        a.coords = c;
        fn(SupportCell{a, tree.alpha[K]});
      }
    }
  }
}

uint64_t support_cell_count(const WeightTree& tree) {
  uint64_t total = 0, pw = 1;
  for (int k = 0; k <= tree.params.K; ++k) {
    total += pw;
    pw *= uint64_t(tree.A);
  }
  if (tree.params.truncation == Truncation::LeafUniform) total += pw;
  return total;
}

}  // namespace swl
