#include "swl/treesum.hpp"

#include <algorithm>
#include <cmath>

#include "swl/simd.hpp"

namespace swl {
namespace {

constexpr int kMaxOrder = 32;

// Pascal triangle for the moment shift; fixed size, computed once.
const double* binomials() {
  static double C[kMaxOrder + 1][kMaxOrder + 1] = {};
  static bool init = [] {
    for (int n = 0; n <= kMaxOrder; ++n) {
      C[n][0] = C[n][n] = 1;
      for (int k = 1; k < n; ++k) C[n][k] = C[n - 1][k - 1] + C[n - 1][k];
    }
    return true;
  }();
  (void)init;
  return &C[0][0];
}

inline double binom(int n, int k) { return binomials()[n * (kMaxOrder + 1) + k]; }

// child scaled moments -> parent frame: s = h_child/h_parent, delta = (c_child-c_parent)/h_parent
void shift_moments(const double* child, double s, double delta, int order, double* parent) {
  double spow[kMaxOrder + 1], dpow[kMaxOrder + 1];
  spow[0] = dpow[0] = 1;
  for (int j = 1; j <= order; ++j) {
    spow[j] = spow[j - 1] * s;
    dpow[j] = dpow[j - 1] * delta;
  }
  for (int j = 0; j <= order; ++j) {
    double acc = 0;
    for (int i = 0; i <= j; ++i) acc += binom(j, i) * child[i] * spow[i] * dpow[j - i];
    parent[j] += acc;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// LatticePointSum

LatticePointSum::LatticePointSum(int level, std::vector<int64_t> coords,
                                 std::vector<double> masses, int order, int leaf_max)
    : level_(level), order_(std::min(order, kMaxOrder)), leaf_max_(leaf_max),
      coords_(std::move(coords)), masses_(std::move(masses)) {
  centers_.resize(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i)
    centers_[i] = static_cast<double>(coords_[i]) + 0.5;
  if (!coords_.empty())
    root_ = build(0, pow3_i64(level_), 0, static_cast<uint32_t>(coords_.size()));
}

int LatticePointSum::build(int64_t lo, int64_t hi, uint32_t begin, uint32_t end) {
  if (begin >= end) return -1;
  const int self = static_cast<int>(nodes_.size());
  {
    Node nd;
    nd.lo = lo;
    nd.hi = hi;
    nd.begin = begin;
    nd.end = end;
    nd.child[0] = nd.child[1] = nd.child[2] = -1;
    nd.center = 0.5 * (static_cast<double>(lo) + static_cast<double>(hi));
    nd.half = 0.5 * static_cast<double>(hi - lo);
    nd.mom = -1;
    nodes_.push_back(nd);
  }
  const bool split = (end - begin) > static_cast<uint32_t>(leaf_max_) && hi - lo >= 3;
  if (split) {
    const int64_t w = (hi - lo) / 3;
    uint32_t b = begin;
    for (int c = 0; c < 3; ++c) {
      const int64_t clo = lo + c * w, chi = clo + w;
      auto it = std::lower_bound(coords_.begin() + b, coords_.begin() + end, chi);
      const uint32_t e = static_cast<uint32_t>(it - coords_.begin());
      const int ch = build(clo, chi, b, e);
      nodes_[self].child[c] = ch;
      b = e;
    }
  }
  // Scaled moments about the node center.
  const int m = static_cast<int>(moments_.size());
  moments_.resize(m + order_ + 1, 0.0);
  nodes_[self].mom = m;
  if (!split) {
    const double c = nodes_[self].center, h = nodes_[self].half;
    for (uint32_t i = begin; i < end; ++i) {
      const double t = (centers_[i] - c) / h;
      double p = masses_[i];
      for (int j = 0; j <= order_; ++j) {
        moments_[m + j] += p;
        p *= t;
      }
    }
  } else {
    for (int c = 0; c < 3; ++c) {
      const int ch = nodes_[self].child[c];
      if (ch < 0) continue;
      const Node& cn = nodes_[ch];
      shift_moments(&moments_[cn.mom], cn.half / nodes_[self].half,
                    (cn.center - nodes_[self].center) / nodes_[self].half, order_,
                    &moments_[m]);
    }
  }
  return self;
}

void LatticePointSum::eval_rec(int node, double x, int64_t exclude, Result& r) const {
  const Node& nd = nodes_[node];
  const double dist = std::max({0.0, static_cast<double>(nd.lo) - x, x - static_cast<double>(nd.hi)});
  if (dist >= nd.half && nd.half > 0) {
    const double u = x - nd.center;
    const double t = nd.half / u;  // |t| <= 1/2
    const double* M = &moments_[nd.mom];
    double horner = M[order_];
    for (int j = order_ - 1; j >= 0; --j) horner = M[j] + horner * t;
    const double val = horner / u;
    r.value += val;
    r.abs_value += std::abs(val);
    const double at = std::abs(t);
    double tp = at;
    for (int j = 0; j < order_; ++j) tp *= at;
    r.err_bound += M[0] * tp / (std::abs(u) * (1 - at));
    return;
  }
  if (nd.child[0] < 0 && nd.child[1] < 0 && nd.child[2] < 0) {
    uint32_t b = nd.begin, e = nd.end;
    // Exclude the source at lattice index `exclude` if it lies in this leaf.
    if (exclude >= nd.lo && exclude < nd.hi) {
      auto it = std::lower_bound(coords_.begin() + b, coords_.begin() + e, exclude);
      if (it != coords_.begin() + e && *it == exclude) {
        const uint32_t s = static_cast<uint32_t>(it - coords_.begin());
        r.value += simd::sum_reciprocal(centers_.data() + b, masses_.data() + b, s - b, x);
        r.abs_value += simd::sum_abs_reciprocal(centers_.data() + b, masses_.data() + b, s - b, x);
        b = s + 1;
      }
    }
    r.value += simd::sum_reciprocal(centers_.data() + b, masses_.data() + b, e - b, x);
    r.abs_value += simd::sum_abs_reciprocal(centers_.data() + b, masses_.data() + b, e - b, x);
    return;
  }
  for (int c = 0; c < 3; ++c)
    if (nd.child[c] >= 0) eval_rec(nd.child[c], x, exclude, r);
}

LatticePointSum::Result LatticePointSum::evaluate(double x, int64_t exclude) const {
  Result r;
  if (root_ >= 0) eval_rec(root_, x, exclude, r);
  return r;
}

// ---------------------------------------------------------------------------
// FieldEvaluator

struct FieldEvaluator::Frame {
  RatPoint x;
  DPoint x_unit{};
  double x_lat = 0;  // d = 1 only, in max_level lattice units
};

FieldEvaluator::FieldEvaluator(const WeightTree& tree, const KernelSpec& kernel, int order,
                               double gl_rel_tol)
    : tree_(tree), kernel_(kernel), order_(std::min(order, kMaxOrder)),
      gl_rel_tol_(gl_rel_tol) {
  max_level_ = tree.child_level(tree.params.K);
  if (kernel_.d == 1) c_eff_ = kernel_of_diff(kernel_, {1.0, 0, 0});
}

namespace {

uint64_t cube_key(const TriadicAddress& B) {
  // d = 1 only (the multipole path); level in the low bits.
  return (static_cast<uint64_t>(B.coords[0]) << 6) | static_cast<uint64_t>(B.level);
}

enum class Rel { Disjoint, AInsideB, BInsideA, Equal };

Rel relation(const TriadicAddress& a, const TriadicAddress& b) {
  if (a.level == b.level) return a == b ? Rel::Equal : Rel::Disjoint;
  if (a.level > b.level) return b.contains(a) ? Rel::AInsideB : Rel::Disjoint;
  return a.contains(b) ? Rel::BInsideA : Rel::Disjoint;
}

}  // namespace

const std::vector<double>& FieldEvaluator::moments_of(const TriadicAddress& B) const {
  const uint64_t key = cube_key(B);
  {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  std::vector<double> M(order_ + 1, 0.0);
  const int64_t scale = pow3_i64(max_level_ - B.level);
  const double lo = static_cast<double>(B.coords[0] * scale);
  const double h = 0.5 * static_cast<double>(scale);
  const double center = lo + h;

  CubeContent cc = resolve_cube(tree_, B);
  if (cc.kind == CubeContent::Uniform) {
    // Unit-mass measure with lattice offsets scaled by h:
    // M_j = rho 3^-L (h/(j+1)) [s^(j+1)] from -1 to 1 over the full cell.
    const double rho = to_double(cc.density);
    const double um = rho * std::pow(3.0, -double(max_level_)) * h;
    for (int j = 0; j <= order_; j += 2) M[j] = um * 2.0 / (j + 1);
  } else if (cc.kind != CubeContent::Outside) {
    for (int c = 0; c < 3; ++c) {
      TriadicAddress ch;
      ch.dim = 1;
      ch.level = B.level + 1;
      ch.coords[0] = 3 * B.coords[0] + c;
      const auto& cm = moments_of(ch);
      const int64_t cs = pow3_i64(max_level_ - ch.level);
      const double clo = static_cast<double>(ch.coords[0] * cs);
      const double chh = 0.5 * static_cast<double>(cs);
      shift_moments(cm.data(), chh / h, (clo + chh - center) / h, order_, M.data());
    }
  }
  std::lock_guard<std::mutex> lock(memo_mu_);
  return memo_.emplace(key, std::move(M)).first->second;
}

void FieldEvaluator::uniform_cell(const Frame& f, const TriadicAddress& B, double density,
                                  Result& r) const {
  const int d = kernel_.d;
  if (d == 1) {
    const int64_t scale = pow3_i64(max_level_ - B.level);
    const double a = static_cast<double>(B.coords[0] * scale);
    const double b = static_cast<double>((B.coords[0] + 1) * scale);
    const double da = f.x_lat - a, db = f.x_lat - b;
    r.value += density * c_eff_ * std::log(da / db);
    return;
  }
  DBox box = to_dbox(B);
  const double side = box.hi[0] - box.lo[0];
  double dist2 = 0;
  for (int i = 0; i < d; ++i) {
    const double g = std::max({0.0, box.lo[i] - f.x_unit[i], f.x_unit[i] - box.hi[i]});
    dist2 += g * g;
  }
  if (std::sqrt(dist2) < side / 10.0) {
    // Too close for the quadrature contract: split the cell.
    std::array<int64_t, kMaxDim> off{};
    std::function<void(int)> emit = [&](int axis) {
      if (axis == d) {
        TriadicAddress ch;
        ch.dim = d;
        ch.level = B.level + 1;
        for (int i = 0; i < d; ++i) ch.coords[i] = 3 * B.coords[i] + off[i];
        uniform_cell(f, ch, density, r);
        return;
      }
      for (off[axis] = 0; off[axis] < 3; ++off[axis]) emit(axis + 1);
    };
    emit(0);
    return;
  }
  QuadResult q = cube_integral(kernel_, f.x_unit, box, gl_rel_tol_);
  r.value += density * q.value;
  r.err += std::abs(density) * q.error_estimate;
}

void FieldEvaluator::rec(const Frame& f, const TriadicAddress& B, const TriadicAddress* exclude,
                         Result& r) const {
  if (exclude) {
    switch (relation(B, *exclude)) {
      case Rel::Equal:
      case Rel::AInsideB:
        return;  // fully excluded
      case Rel::Disjoint:
        exclude = nullptr;
        break;
      case Rel::BInsideA:
        break;  // must keep descending
    }
  }
  CubeContent cc = resolve_cube(tree_, B);
  if (cc.kind == CubeContent::Outside) return;

  const int d = kernel_.d;
  if (cc.kind == CubeContent::Uniform && exclude == nullptr) {
    uniform_cell(f, B, to_double(cc.density), r);  // exact logs in d = 1
    return;
  }
  if (d == 1 && exclude == nullptr) {
    const int64_t scale = pow3_i64(max_level_ - B.level);
    const double lo = static_cast<double>(B.coords[0] * scale);
    const double hi = static_cast<double>((B.coords[0] + 1) * scale);
    const double h = 0.5 * (hi - lo);
    const double dist = std::max({0.0, lo - f.x_lat, f.x_lat - hi});
    if (dist >= h && h > 0) {
      const auto& M = moments_of(B);
      const double u = f.x_lat - (lo + h);
      const double t = h / u;
      double horner = M[order_];
      for (int j = order_ - 1; j >= 0; --j) horner = M[j] + horner * t;
      const double latf = std::pow(3.0, double(max_level_));
      r.value += c_eff_ * latf * horner / u;
      const double at = std::abs(t);
      double tp = at;
      for (int j = 0; j < order_; ++j) tp *= at;
      r.err += std::abs(c_eff_) * latf * M[0] * tp / (std::abs(u) * (1 - at));
      return;
    }
  }

  if (cc.kind == CubeContent::Uniform && exclude && B == *exclude) return;

  // Uniform with an exclusion strictly inside, or structured content: split.
  std::array<int64_t, kMaxDim> off{};
  std::function<void(int)> emit = [&](int axis) {
    if (axis == d) {
      TriadicAddress ch;
      ch.dim = d;
      ch.level = B.level + 1;
      for (int i = 0; i < d; ++i) ch.coords[i] = 3 * B.coords[i] + off[i];
      rec(f, ch, exclude, r);
      return;
    }
    for (off[axis] = 0; off[axis] < 3; ++off[axis]) emit(axis + 1);
  };
  emit(0);
}

FieldEvaluator::Result FieldEvaluator::integrate(const RatPoint& x, const TriadicAddress& region,
                                                 const TriadicAddress* exclude) const {
  Frame f;
  f.x = x;
  f.x_unit = to_dpoint(x, kernel_.d);
  if (kernel_.d == 1) f.x_lat = to_double(x[0] * Rational(pow3_big(max_level_)));
  Result r;
  rec(f, region, exclude, r);
  return r;
}

FieldEvaluator::Result FieldEvaluator::outside_node(const RatPoint& x, int k,
                                                    std::size_t idx) const {
  TriadicAddress q = tree_.node_addr(k, tree_.gens[k].nodes[idx]);
  return integrate(x, root_cube(tree_.params.d), &q);
}

FieldEvaluator::Result FieldEvaluator::children_region(const RatPoint& x, int k,
                                                       std::size_t idx) const {
  TriadicAddress hat = tree_.hat_of(k, tree_.gens[k].nodes[idx]);
  return integrate(x, hat, nullptr);
}

FieldEvaluator::Result FieldEvaluator::except_cell(const RatPoint& x,
                                                   const TriadicAddress& cell) const {
  return integrate(x, root_cube(tree_.params.d), &cell);
}

// ---------------------------------------------------------------------------
// CellField1D

CellField1D::CellField1D(std::vector<Cell> cells, double c_eff, int order, int leaf_max)
    : order_(std::min(order, kMaxOrder)), leaf_max_(leaf_max), c_eff_(c_eff),
      cells_(std::move(cells)) {
  fine_level_ = 0;
  for (const auto& c : cells_) fine_level_ = std::max(fine_level_, c.level);
  std::sort(cells_.begin(), cells_.end(), [&](const Cell& a, const Cell& b) {
    return a.coord * pow3_i64(fine_level_ - a.level) < b.coord * pow3_i64(fine_level_ - b.level);
  });
  fine_lo_.resize(cells_.size());
  fine_hi_.resize(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const int64_t s = pow3_i64(fine_level_ - cells_[i].level);
    fine_lo_[i] = cells_[i].coord * s;
    fine_hi_[i] = fine_lo_[i] + s;
  }
  if (!cells_.empty()) root_ = build(0, pow3_i64(fine_level_), 0, uint32_t(cells_.size()));
}

int CellField1D::build(int64_t lo, int64_t hi, uint32_t begin, uint32_t end) {
  if (begin >= end) return -1;
  const int self = static_cast<int>(nodes_.size());
  {
    Node nd;
    nd.lo = lo;
    nd.hi = std::max(hi, fine_hi_[end - 1]);  // a cell may outsize the block
    nd.begin = begin;
    nd.end = end;
    nd.child[0] = nd.child[1] = nd.child[2] = -1;
    nd.center = 0.5 * (static_cast<double>(lo) + static_cast<double>(nd.hi));
    nd.half = 0.5 * static_cast<double>(nd.hi - lo);
    nd.mom = -1;
    nodes_.push_back(nd);
  }
  const bool oversize = fine_hi_[end - 1] > hi;
  const bool split = !oversize && (end - begin) > uint32_t(leaf_max_) && hi - lo >= 3;
  if (split) {
    const int64_t w = (hi - lo) / 3;
    uint32_t b = begin;
    for (int c = 0; c < 3; ++c) {
      const int64_t clo = lo + c * w, chi = clo + w;
      auto it = std::lower_bound(fine_lo_.begin() + b, fine_lo_.begin() + end, chi);
      const uint32_t e = static_cast<uint32_t>(it - fine_lo_.begin());
      const int ch = build(clo, chi, b, e);
      nodes_[self].child[c] = ch;
      b = e;
    }
  }
  const int m = static_cast<int>(moments_.size());
  moments_.resize(m + order_ + 1, 0.0);
  nodes_[self].mom = m;
  const double unit = std::pow(3.0, -double(fine_level_));
  if (!split) {
    const double cc = nodes_[self].center, h = nodes_[self].half;
    for (uint32_t i = begin; i < end; ++i) {
      // uniform piece moments: rho * 3^-L * int ((y-c)/h)^j dy over the cell
      const double a = (static_cast<double>(fine_lo_[i]) - cc) / h;
      const double b = (static_cast<double>(fine_hi_[i]) - cc) / h;
      const double um = cells_[i].value * unit * h;
      double pa = a, pb = b;
      for (int j = 0; j <= order_; ++j) {
        moments_[m + j] += um * (pb - pa) / (j + 1);
        pa *= a;
        pb *= b;
      }
    }
  } else {
    for (int c = 0; c < 3; ++c) {
      const int ch = nodes_[self].child[c];
      if (ch < 0) continue;
      const Node& cn = nodes_[ch];
      shift_moments(&moments_[cn.mom], cn.half / nodes_[self].half,
                    (cn.center - nodes_[self].center) / nodes_[self].half, order_,
                    &moments_[m]);
    }
  }
  return self;
}

double CellField1D::evaluate(const Rational& x, std::ptrdiff_t exclude_cell) const {
  if (root_ < 0) return 0;
  const double x_lat = to_double(x * Rational(pow3_big(fine_level_)));
  const double latf = std::pow(3.0, double(fine_level_));
  double total = 0;

  std::function<void(int)> walk = [&](int ni) {
    const Node& nd = nodes_[ni];
    const double lo = static_cast<double>(nd.lo), hi = static_cast<double>(nd.hi);
    const double dist = std::max({0.0, lo - x_lat, x_lat - hi});
    const bool excl_inside = exclude_cell >= 0 && uint32_t(exclude_cell) >= nd.begin &&
                             uint32_t(exclude_cell) < nd.end;
    if (!excl_inside && dist >= nd.half && nd.half > 0) {
      const double* M = &moments_[nd.mom];
      const double u = x_lat - nd.center;
      const double t = nd.half / u;
      double horner = M[order_];
      for (int j = order_ - 1; j >= 0; --j) horner = M[j] + horner * t;
      total += c_eff_ * latf * horner / u;
      return;
    }
    if (nd.child[0] < 0 && nd.child[1] < 0 && nd.child[2] < 0) {
      for (uint32_t i = nd.begin; i < nd.end; ++i) {
        if (std::ptrdiff_t(i) == exclude_cell) continue;
        const double da = x_lat - static_cast<double>(fine_lo_[i]);
        const double db = x_lat - static_cast<double>(fine_hi_[i]);
        total += cells_[i].value * c_eff_ * std::log(da / db);
      }
      return;
    }
    for (int c = 0; c < 3; ++c)
      if (nd.child[c] >= 0) walk(nd.child[c]);
  };
  walk(root_);
  return total;
}

}  // namespace swl
