#include "swl/singular.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>

#include "swl/quadrature.hpp"
#include "swl/simd.hpp"

namespace swl {

OperatorEvaluator::OperatorEvaluator(const WeightTree& tree, EvalOptions opts)
    : OperatorEvaluator(tree, tree.params.kernel, opts) {}

OperatorEvaluator::OperatorEvaluator(const WeightTree& tree, const KernelSpec& kernel,
                                     EvalOptions opts)
    : tree_(tree), kernel_(kernel), opts_(opts) {
  field_ = std::make_unique<FieldEvaluator>(tree, kernel_, opts.multipole_order, 1e-9);
  tables_.resize(tree.params.K + 1);
}

const LevelMassTable& OperatorEvaluator::table(int k) const {
  std::lock_guard<std::mutex> lock(table_mu_);
  if (!tables_.at(k)) tables_[k] = std::make_unique<LevelMassTable>(level_mass_table(tree_, k));
  return *tables_[k];
}

double OperatorEvaluator::ii1(int k, std::size_t node_idx, double* abs_out) const {
  const TreeNode& n = tree_.gens[k].nodes[node_idx];
  const int d = tree_.params.d;
  const int cl = tree_.child_level(k);
  const SignVector sigma = tree_.sigma_of(n);

  // Reference point in child-level lattice units: the contact corner v, or
  // the J-cube center for the Riesz cross-check variant.
  DPoint ref{};
  {
    TriadicAddress hat = tree_.hat_of(k, n);
    const int64_t f = pow3_i64(cl - hat.level);
    for (int i = 0; i < d; ++i)
      ref[i] = static_cast<double>((hat.coords[i] + (sigma.s[i] > 0 ? 1 : 0)) * f);
    if (opts_.ii1_ref == II1Reference::JCenter) {
      if (!(kernel_.kind == KernelKind::Hilbert || kernel_.kind == KernelKind::Riesz))
        throw SwlError(ErrorCode::Config, "JCenter reference is the Riesz special case");
      TriadicAddress J = tree_.j_of(k, n);
      for (int i = 0; i < d; ++i) ref[i] = static_cast<double>(J.coords[i]) + 0.5;
    }
  }

  // Child masses are alpha_k |L| exactly (tail-adjusted under DropTail).
  Rational cm = tree_.alpha[k] / Rational(pow3_big(cl * d));
  if (tree_.params.truncation == Truncation::DropTail) {
    if (k == tree_.params.K) {
      if (abs_out) *abs_out = 0;
      return 0;  // dropped tail: the children carry no mass
    }
    const Rational q(BigInt(tree_.A), BigInt(tree_.A) + 1);
    Rational qe(1);
    for (int i = 0; i < tree_.params.K - k; ++i) qe *= q;
    cm *= Rational(1) - qe;
  }
  const double child_mass = to_double(cm);

  thread_local std::vector<double> cx, cy, ms;
  cx.clear();
  cy.clear();
  for (const auto& m : tree_.child_offsets) {
    auto c = tree_.child_coord(k, n, m);
    cx.push_back(static_cast<double>(c[0]) + 0.5);
    if (d >= 2) cy.push_back(static_cast<double>(c[1]) + 0.5);
  }
  ms.assign(cx.size(), child_mass);

  double val = 0, av = 0;
  if (kernel_.kind == KernelKind::Hilbert) {
    const double c_eff = kernel_of_diff(kernel_, {1.0, 0, 0});
    const double scale = std::pow(3.0, double(cl));
    val = c_eff * scale * simd::sum_reciprocal(cx.data(), ms.data(), cx.size(), ref[0]);
    av = std::abs(c_eff) * scale *
         simd::sum_abs_reciprocal(cx.data(), ms.data(), cx.size(), ref[0]);
  } else if (kernel_.kind == KernelKind::Riesz && d == 2) {
    const double c_eff = (kernel_.adjoint ? -1.0 : 1.0) * kernel_.normalization;
    const double scale = std::pow(3.0, 2.0 * cl);
    double s, a;
    simd::sum_riesz2_with_abs(cx.data(), cy.data(), ms.data(), cx.size(), ref[0], ref[1],
                              kernel_.riesz_axis - 1, &s, &a);
    val = c_eff * scale * s;
    av = std::abs(c_eff) * scale * a;
  } else {
    const double unit = std::pow(3.0, -double(cl));
    for (std::size_t i = 0; i < cx.size(); ++i) {
      DPoint diff{};
      diff[0] = (ref[0] - cx[i]) * unit;
      if (d >= 2) diff[1] = (ref[1] - cy[i]) * unit;
      const double kv = kernel_of_diff(kernel_, diff);
      val += kv * child_mass;
      av += std::abs(kv) * child_mass;
    }
  }
  if (abs_out) *abs_out = av;
  return val;
}

OperatorBreakdown OperatorEvaluator::breakdown(int k, std::size_t node_idx,
                                               const RatPoint& x) const {
  const TreeNode& n = tree_.gens[k].nodes[node_idx];
  TriadicAddress J = tree_.j_of(k, n);
  TriadicAddress hatJ = middle_child(J);
  if (!hatJ.contains_point(x))
    throw SwlError(ErrorCode::Config, "evaluation point must lie in the middle child of J(Q)");

  OperatorBreakdown b;
  b.x = x;
  b.generation = k;
  b.density = tree_.alpha[k];
  b.i1_sign = n.i1_sign;

  const LevelMassTable& tab = table(k);
  b.I1 = i1_discrete(tree_, k, n, tab, nullptr);
  b.II1 = ii1(k, node_idx, &b.ii1_abs);

  auto outer = field_->outside_node(x, k, node_idx);
  auto inner = field_->children_region(x, k, node_idx);
  b.I2 = outer.value - b.I1;
  b.II2 = inner.value - b.II1;
  b.quad_err = outer.err + inner.err;

  const DPoint xu = to_dpoint(x, tree_.params.d);
  b.III = to_double(tree_.alpha[k]) * pv_self_integral(kernel_, xu, J);

  b.total = b.I1 + b.I2 + b.II1 + b.II2 + b.III;
  return b;
}

double OperatorEvaluator::value_at_support_point(const RatPoint& x, const TriadicAddress& cell,
                                                 const Rational& cell_density,
                                                 double* err) const {
  auto outside = field_->except_cell(x, cell);
  const DPoint xu = to_dpoint(x, tree_.params.d);
  const double self = to_double(cell_density) * pv_box_interior(kernel_, xu, to_dbox(cell));
  if (err) *err = outside.err;
  return outside.value + self;
}

AnnulusDiagnostics OperatorEvaluator::annuli(int k, std::size_t node_idx) const {
  const TreeNode& n = tree_.gens[k].nodes[node_idx];
  const int d = tree_.params.d;
  const int cl = tree_.child_level(k);
  const SignVector sigma = tree_.sigma_of(n);
  TriadicAddress hat = tree_.hat_of(k, n);
  const int64_t f = pow3_i64(cl - hat.level);
  std::array<int64_t, kMaxDim> vlat{};
  for (int i = 0; i < d; ++i) vlat[i] = (hat.coords[i] + (sigma.s[i] > 0 ? 1 : 0)) * f;

  const double child_mass = to_double(tree_.alpha[k] / Rational(pow3_big(cl * d)));
  const double unit = std::pow(3.0, -double(cl));

  std::map<int, std::pair<uint64_t, double>> shells;
  double harmonic = 0;
  for (const auto& m : tree_.child_offsets) {
    auto c = tree_.child_coord(k, n, m);
    // |c_L - v|^2 in quarter-lattice units is an exact integer.
    BigInt q2 = 0;
    int64_t linf = 0;
    for (int i = 0; i < d; ++i) {
      const int64_t twice = 2 * (c[i] - vlat[i]) + 1;  // 2(c_L - v) per axis
      q2 += BigInt(twice) * twice;
      // distance from the J-cube center: integer lattice offsets
      linf = std::max(linf, std::abs(m[i] + 1));
    }
    // smallest i >= 1 with |c_L - v| <= 3^i, via exact integer comparison
    int idx = 1;
    BigInt bound = 36;  // (2*3^1)^2
    while (q2 > bound) {
      ++idx;
      bound *= 9;
    }
    const double dist = std::sqrt(q2.convert_to<double>()) / 2.0;
    double distd = dist;
    for (int i = 1; i < d; ++i) distd *= dist;
    auto& sh = shells[idx];
    sh.first += 1;
    sh.second += child_mass / (distd * std::pow(unit, d));
    double linfd = double(linf);
    for (int i = 1; i < d; ++i) linfd *= double(linf);
    harmonic += 1.0 / linfd;
  }

  AnnulusDiagnostics out;
  out.total_children = tree_.child_offsets.size();
  out.harmonic_sum = harmonic;
  const double base = std::pow(3.0, -double(cl));
  for (const auto& [i, sh] : shells) {
    out.index.push_back(i);
    out.count.push_back(sh.first);
    out.inv_dist_mass.push_back(sh.second);
    out.radius_lo.push_back(std::pow(3.0, i - 1) * base);
    out.radius_hi.push_back(std::pow(3.0, i) * base);
  }
  return out;
}

// ---------------------------------------------------------------------------
// brute-force oracle

double brute_force_T(const WeightTree& tree, const KernelSpec& kernel, const RatPoint& x,
                     double rel_tol, double* err_out) {
  const int d = tree.params.d;
  const DPoint xu = to_dpoint(x, d);
  double total = 0, err = 0;
  bool self_found = false;
  for_each_support_cell(tree, [&](const SupportCell& cell) {
    if (cell.addr.contains_point(x)) {
      total += to_double(cell.density) * pv_box_interior(kernel, xu, to_dbox(cell.addr));
      self_found = true;
      return;
    }
    const double dens = to_double(cell.density);
    // Split when the quadrature contract is violated (adjacent cells).
    std::function<void(const TriadicAddress&)> add = [&](const TriadicAddress& c) {
      try {
        QuadResult q = cube_integral(kernel, xu, c, rel_tol);
        total += dens * q.value;
        err += std::abs(dens) * q.error_estimate;
      } catch (const SingularityTooCloseError&) {
        std::array<int64_t, kMaxDim> off{};
        std::function<void(int)> emit = [&](int axis) {
          if (axis == d) {
            TriadicAddress ch;
            ch.dim = d;
            ch.level = c.level + 1;
            for (int i = 0; i < d; ++i) ch.coords[i] = 3 * c.coords[i] + off[i];
            add(ch);
            return;
          }
          for (off[axis] = 0; off[axis] < 3; ++off[axis]) emit(axis + 1);
        };
        emit(0);
      }
    };
    add(cell.addr);
  });
  if (!self_found)
    throw SwlError(ErrorCode::Config, "brute_force_T: point not on the support interior");
  if (err_out) *err_out = err;
  return total;
}

// ---------------------------------------------------------------------------
// ratio report

namespace {

std::vector<std::size_t> sample_nodes(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (n <= cap) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
  } else {
    for (std::size_t j = 0; j < cap; ++j) idx.push_back(j * n / cap);
  }
  return idx;
}

std::vector<RatPoint> sample_points(const WeightTree& tree, int k, const TreeNode& n,
                                    int samples_per_node) {
  TriadicAddress hatJ = middle_child(tree.j_of(k, n));
  std::vector<RatPoint> pts{hatJ.center()};
  if (samples_per_node > 1) {
    const int d = tree.params.d;
    const Rational off = hatJ.side() / 4;  // stays inside the pv-admissible zone
    for (int mask = 0; mask < (1 << d); ++mask) {
      RatPoint p = hatJ.center();
      for (int i = 0; i < d; ++i) p[i] += (mask >> i) & 1 ? off : -off;
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace

RatioReport ratio_report(const WeightTree& tree, const EvalOptions& opts, int samples_per_node,
                         int max_nodes_per_gen, int threads) {
  OperatorEvaluator ev(tree, opts);
  RatioReport rep;
  rep.d = tree.params.d;
  rep.N = tree.params.N;
  rep.K = tree.params.K;
  rep.min_ratio = 1e300;
  rep.max_cont_ratio = 0;

  for (int k = 0; k <= tree.params.K; ++k) {
    auto nodes = sample_nodes(tree.gens[k].nodes.size(), std::size_t(max_nodes_per_gen));
    struct Cell {
      std::size_t node;
      RatPoint x;
    };
    std::vector<Cell> cells;
    for (auto ni : nodes)
      for (const auto& x : sample_points(tree, k, tree.gens[k].nodes[ni], samples_per_node))
        cells.push_back({ni, x});

    std::vector<RatioRow> rows(cells.size());
    parallel_for(cells.size(), threads, [&](std::size_t i) {
      RatioRow r;
      r.generation = k;
      r.node = cells[i].node;
      r.x = cells[i].x;
      r.b = ev.breakdown(k, cells[i].node, cells[i].x);
      const double dens = to_double(r.b.density);
      r.ratio = std::abs(r.b.total) / dens;
      r.ratio_over_n = r.ratio / tree.params.N;
      r.cont_ratio = (std::abs(r.b.I2) + std::abs(r.b.II2) + std::abs(r.b.III)) / dens;
      rows[i] = r;
    });

    double genmin = 1e300;
    for (auto& r : rows) {
      genmin = std::min(genmin, r.ratio);
      rep.max_cont_ratio = std::max(rep.max_cont_ratio, r.cont_ratio);
      rep.rows.push_back(std::move(r));
    }
    rep.min_ratio_per_gen.push_back(genmin);
    rep.min_ratio = std::min(rep.min_ratio, genmin);
  }
  rep.min_ratio_over_n = rep.min_ratio / tree.params.N;
  return rep;
}

std::string ratio_report_csv(const RatioReport& rep) {
  std::ostringstream os;
  os << "d,N,K,generation,node_id,x,I1,I2,II1,II2,III,total,ratio,ratio_over_N,quad_err\r\n";
  for (const auto& r : rep.rows) {
    os << rep.d << ',' << rep.N << ',' << rep.K << ',' << r.generation << ',' << r.node << ',';
    os << '"';
    for (int i = 0; i < rep.d; ++i) {
      if (i) os << ';';
      os << double_to_string(to_double(r.x[i]));
    }
    os << '"';
    os << ',' << double_to_string(r.b.I1) << ',' << double_to_string(r.b.I2) << ','
       << double_to_string(r.b.II1) << ',' << double_to_string(r.b.II2) << ','
       << double_to_string(r.b.III) << ',' << double_to_string(r.b.total) << ','
       << double_to_string(r.ratio) << ',' << double_to_string(r.ratio_over_n) << ','
       << double_to_string(r.b.quad_err) << "\r\n";
  }
  return os.str();
}

SignCheckResult sign_alignment_check(const WeightTree& tree, uint64_t budget, int threads) {
  OperatorEvaluator ev(tree);
  SignCheckResult res;
  res.exhaustive = true;
  for (int k = 0; k <= tree.params.K; ++k) {
    const std::size_t nn = tree.gens[k].nodes.size();
    std::size_t stride = 1;
    const uint64_t cost = uint64_t(nn) * uint64_t(tree.A);
    if (cost > budget) {
      stride = std::max<std::size_t>(1, std::size_t(cost / budget));
      res.exhaustive = false;
    }
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < nn; i += stride) picks.push_back(i);
    std::atomic<uint64_t> mism{0}, ties{0};
    parallel_for(picks.size(), threads, [&](std::size_t pi) {
      const std::size_t i = picks[pi];
      const TreeNode& n = tree.gens[k].nodes[i];
      if (n.i1_sign == 0) {
        ties.fetch_add(1);
        return;
      }
      double v = ev.ii1(k, i, nullptr);
      if ((v > 0 ? 1 : -1) != n.i1_sign) mism.fetch_add(1);
    });
    res.nodes_checked += picks.size();
    res.mismatches += mism.load();
    res.ties += ties.load();
  }
  return res;
}

double dhat_statistic(const WeightTree& tree, double p, int s, int threads) {
  OperatorEvaluator ev(tree);
  struct Cell {
    int k;
    std::size_t node;
    RatPoint x;
    TriadicAddress j;
  };
  std::vector<Cell> cells;
  const int d = tree.params.d;
  for (int k = 0; k <= tree.params.K; ++k) {
    for (std::size_t ni = 0; ni < tree.gens[k].nodes.size(); ++ni) {
      TriadicAddress J = tree.j_of(k, tree.gens[k].nodes[ni]);
      TriadicAddress hatJ = middle_child(J);
      const int64_t f = pow3_i64(s);
      std::array<int64_t, kMaxDim> off{};
      std::function<void(int)> emit = [&](int axis) {
        if (axis == d) {
          TriadicAddress sub;
          sub.dim = d;
          sub.level = hatJ.level + s;
          for (int i = 0; i < d; ++i) sub.coords[i] = hatJ.coords[i] * f + off[i];
          cells.push_back({k, ni, sub.center(), J});
          return;
        }
        for (off[axis] = 0; off[axis] < f; ++off[axis]) emit(axis + 1);
      };
      emit(0);
    }
  }
  std::vector<double> vals(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    const auto& c = cells[i];
    OperatorBreakdown b = ev.breakdown(c.k, c.node, c.x);
    const double w = to_double(b.density);
    const Rational vol = middle_child(c.j).volume() / Rational(pow3_big(s * d));
    vals[i] = std::pow(std::abs(b.total), p) * std::pow(w, 1.0 - p) * to_double(vol);
  });
  double sum = 0;
  for (double v : vals) sum += v;
  return sum;
}

}  // namespace swl
