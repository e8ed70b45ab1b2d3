#include "swl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swl/quadrature.hpp"

namespace swl {
namespace {

void validate(const HarnessParams& hp) {
  if (hp.p <= 1) throw SwlError(ErrorCode::Config, "p must exceed 1");
  if (!(1.0 / hp.p < hp.eps && hp.eps < 1))
    throw SwlError(ErrorCode::Config, "eps must lie in (1/p, 1)");
  if (hp.N0 < 2) throw SwlError(ErrorCode::Config, "N0 must be >= 2");
  if (hp.d != 1) throw SwlError(ErrorCode::Config, "harness computations are 1-d");
}

WeightTree build_hump(const HarnessParams& hp, int N, bool adjoint) {
  KernelSpec base = kernel_from_id(hp.kernel_id);
  KernelSpec eff = adjoint ? adjoint_of(base) : base;
  BuildParams bp;
  bp.d = hp.d;
  bp.N = N;
  bp.K = hp.K;
  bp.kernel = eff;
  bp.cones = find_cones(eff);
  bp.adjoint_flag = adjoint;
  bp.threads = hp.threads;
  return build(bp);
}

struct FCells {
  // per cell: geometry, weight density, T*w, Mw, f value, w-mass
  std::vector<CellField1D::Cell> geom;   // value field reused for f
  std::vector<double> w_density;
  std::vector<double> tstar_w;
  std::vector<double> mw;
  std::vector<double> f;
  std::vector<double> wmass;
  int fine_level = 0;
};

/// Sub-resolve the J-cells 3^s-fold and evaluate T*w and Mw there. The
/// J-cells are the weight's support D_N in the idealized construction; the
/// leaf layer stands in for the unresolved tail and only contributes as mass
/// inside T*w and Mw, never as an f-cell.
FCells make_f_cells(const HarnessParams& hp, const WeightTree& tree) {
  struct Sub {
    TriadicAddress cell;  // subcell
    TriadicAddress atom;  // owning constant-density cell
    double density;
  };
  std::vector<Sub> subs;
  const int d = tree.params.d;
  const int64_t f = pow3_i64(hp.s);
  for (int k = 0; k <= tree.params.K; ++k) {
    for (const auto& n : tree.gens[k].nodes) {
      const SupportCell sc{tree.j_of(k, n), tree.alpha[k]};
      for (int64_t o = 0; o < f; ++o) {
        TriadicAddress sub;
        sub.dim = d;
        sub.level = sc.addr.level + hp.s;
        sub.coords[0] = sc.addr.coords[0] * f + o;
        subs.push_back({sub, sc.addr, to_double(sc.density)});
      }
    }
  }

  OperatorEvaluator ev(tree);  // the tree's own (adjoint) kernel
  FCells out;
  const std::size_t n = subs.size();
  out.geom.resize(n);
  out.w_density.resize(n);
  out.tstar_w.resize(n);
  out.mw.resize(n);
  out.f.resize(n);
  out.wmass.resize(n);

  CertificateSet certs;
  if (hp.mw_mode == MwMode::CertifiedUpper)
    for (int k = 0; k <= tree.params.K; ++k) {
      auto rep = verify_claim21(tree, k);
      if (rep.pass()) certs.generations.insert(k);
    }

  parallel_for(n, hp.threads, [&](std::size_t i) {
    const auto& s = subs[i];
    RatPoint x = s.cell.center();
    Rational dens = density_at(tree, x);
    const double tw = ev.value_at_support_point(x, s.atom, dens, nullptr);
    double mw;
    switch (hp.mw_mode) {
      case MwMode::WSubstitute:
        mw = s.density;
        break;
      case MwMode::CertifiedUpper:
        mw = certified_upper(tree, x, certs);
        break;
      case MwMode::MaximalLower:
        mw = maximal_lower(tree, x, tree.child_level(tree.params.K)).lower;
        break;
    }
    out.tstar_w[i] = tw;
    out.mw[i] = mw;
    out.f[i] = s.density * tw / (mw * mw);
    out.wmass[i] = s.density * to_double(s.cell.volume());
    out.geom[i] = {s.cell.level, s.cell.coords[0], out.f[i]};
    out.w_density[i] = s.density;
  });
  out.fine_level = 0;
  for (const auto& g : out.geom) out.fine_level = std::max(out.fine_level, g.level);
  return out;
}

/// Tf at every cell center (base kernel), with the symmetric self cell
/// dropping out exactly for the odd 1-d kernel.
std::vector<double> apply_T_to_f(const HarnessParams& hp, const FCells& fc) {
  KernelSpec base = kernel_from_id(hp.kernel_id);
  const double c_eff = kernel_of_diff(base, {1.0, 0, 0});
  CellField1D field(fc.geom, c_eff);
  // The field sorts cells by position; map sorted order back to input order.
  const auto& sorted = field.cells();
  std::vector<double> tf(fc.geom.size());
  std::vector<std::pair<std::pair<int, int64_t>, std::size_t>> pos(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    pos[i] = {{sorted[i].level, sorted[i].coord}, i};
  std::sort(pos.begin(), pos.end());
  auto sorted_index = [&](int level, int64_t coord) {
    auto it = std::lower_bound(pos.begin(), pos.end(),
                               std::make_pair(std::make_pair(level, coord), std::size_t(0)));
    return it->second;
  };
  parallel_for(fc.geom.size(), hp.threads, [&](std::size_t i) {
    const auto& g = fc.geom[i];
    TriadicAddress cell;
    cell.dim = 1;
    cell.level = g.level;
    cell.coords[0] = g.coord;
    RatPoint x = cell.center();
    const std::size_t si = sorted_index(g.level, g.coord);
    tf[i] = field.evaluate(x[0], std::ptrdiff_t(si));
    // self term: p.v. over the cell at its center vanishes by oddness
  });
  return tf;
}

struct Sweep {
  double lhs;
  double lambda0;
};
Sweep lambda_sweep(const std::vector<double>& tf, const std::vector<double>& wmass) {
  std::vector<std::pair<double, double>> v(tf.size());
  for (std::size_t i = 0; i < tf.size(); ++i) v[i] = {std::abs(tf[i]), wmass[i]};
  std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double tail = 0, best = 0, lam = 0;
  for (auto& [val, m] : v) {
    tail += m;  // w({|Tf| >= val}); sup over lambda -> val- of lambda * tail
    if (val * tail > best) {
      best = val * tail;
      lam = val;
    }
  }
  return {best, lam};
}

}  // namespace

Thm2Bundle thm2_bundle(const HarnessParams& hp, int N) {
  validate(hp);
  WeightTree tree = build_hump(hp, N, /*adjoint=*/true);
  FCells fc = make_f_cells(hp, tree);
  std::vector<double> tf = apply_T_to_f(hp, fc);

  Thm2Bundle out;
  Thm2Result& r = out.thm2;
  r.N = N;
  auto sw = lambda_sweep(tf, fc.wmass);
  r.lhs = sw.lhs;
  r.lambda0 = sw.lambda0;

  Cond6Result& c6 = out.cond6;
  c6.N = N;
  double rhs = 0, pos = 0, tfw = 0, ftw = 0;
  for (std::size_t i = 0; i < tf.size(); ++i) {
    const double vol = fc.wmass[i] / fc.w_density[i];
    rhs += std::abs(fc.f[i]) * fc.mw[i] * vol;
    const double q = fc.tstar_w[i] / fc.mw[i];
    pos += q * q * fc.wmass[i];
    tfw += tf[i] * fc.wmass[i];
    ftw += fc.f[i] * fc.tstar_w[i] * vol;
    c6.lhs += std::pow(std::abs(tf[i]), hp.p) * fc.w_density[i] * vol;
    const double mr = fc.mw[i] / fc.w_density[i];
    c6.rhs += std::pow(std::abs(fc.f[i]), hp.p) * std::pow(mr, hp.p) * fc.w_density[i] * vol;
  }
  r.rhs = rhs;
  r.positivity = pos;
  r.duality_gap = std::abs(tfw - ftw) / std::max(1e-300, std::abs(ftw));
  return out;
}

Thm2Result thm2_ratio(const HarnessParams& hp, int N) { return thm2_bundle(hp, N).thm2; }

Cond6Result condition6_ratio(const HarnessParams& hp, int N) { return thm2_bundle(hp, N).cond6; }

HumpSeries hump_gliding_series(const HarnessParams& hp) {
  validate(hp);
  HumpSeries out;
  double apartial = 0, refpartial = 0;
  out.a_over_reference_min = 1e300;
  for (int N = hp.N0; N <= hp.Nmax; ++N) {
    WeightTree tree = build_hump(hp, N, /*adjoint=*/false);
    const double cN = dhat_statistic(tree, hp.p, hp.s, hp.threads);
    out.Ns.push_back(N);
    out.c_N.push_back(cN);
    apartial += std::pow(double(N), -hp.eps * hp.p) * cN;
    refpartial += std::pow(double(N), hp.p * (1 - hp.eps));
    out.A_partials.push_back(apartial);
    out.reference_partials.push_back(refpartial);
    out.a_over_reference_min = std::min(out.a_over_reference_min, apartial / refpartial);
  }
  // Analytic B-term bound: sum over N of (sum_{J != N} J^-eps 3^(-dN/2) 3^(-dJ/2))^p.
  auto bterm = [&](int N, int Jmax) {
    double inner = 0;
    for (int J = hp.N0; J <= Jmax; ++J) {
      if (J == N) continue;
      inner += std::pow(double(J), -hp.eps) *
               std::pow(3.0, -0.5 * hp.d * double(N) - 0.5 * hp.d * double(J));
    }
    return std::pow(inner, hp.p);
  };
  const int extent = hp.N0 + 40;
  double bpartial = 0;
  std::vector<double> ball;
  for (int m = hp.N0; m <= extent; ++m) {
    bpartial += bterm(m, extent);
    ball.push_back(bpartial);
    if (m <= hp.N0 + 10) out.B_bound_partials.push_back(bpartial);
  }
  out.b_tail_at_10 = ball.back() - out.B_bound_partials.back();
  return out;
}

double calibrate_cross_hump_C(const HarnessParams& hp) {
  auto r = cross_hump_bound(hp, hp.N0, hp.N0 + 1, 0);
  return 1.05 * r.actual * std::pow(3.0, 0.5 * hp.d * double(hp.N0 + hp.N0 + 1));
}

CrossHumpResult cross_hump_bound(const HarnessParams& hp, int N, int J, double calibrated_C) {
  validate(hp);
  if (N == J) throw SwlError(ErrorCode::Config, "cross humps need N != J");
  WeightTree treeJ = build_hump(hp, J, /*adjoint=*/false);
  FieldEvaluator fe(treeJ, treeJ.params.kernel);

  // Sample x over hump N's unit cube; in hump J's local frame that point
  // sits at x_local + 3^N - 3^J along the translation axis.
  CrossHumpResult out;
  out.N = N;
  out.J = J;
  for (Rational xr : {Rational(1, 2), Rational(1, 10), Rational(9, 10)}) {
    RatPoint x{};
    // exact lattice shift: 3^N - 3^J in unit coordinates
    x[0] = xr + Rational(pow3_big(N)) - Rational(pow3_big(J));
    auto v = fe.integrate(x, root_cube(1), nullptr);
    out.actual = std::max(out.actual, std::abs(v.value));
  }
  out.bound = calibrated_C * std::pow(3.0, -0.5 * hp.d * double(N)) *
              std::pow(3.0, -0.5 * hp.d * double(J));
  return out;
}

LocalA1Report local_a1_check(const HarnessParams& hp) {
  validate(hp);
  LocalA1Report rep;
  const double nined = std::pow(9.0, hp.d);
  for (int N = hp.N0; N <= hp.Nmax; ++N) {
    WeightTree tree = build_hump(hp, N, /*adjoint=*/false);
    WeightTree next = build_hump(hp, N + 1, /*adjoint=*/false);

    double single = 0, cross = 0;
    int count = 0;
    for (int k = 0; k <= tree.params.K && count < 8; ++k) {
      for (std::size_t ni = 0; ni < tree.gens[k].nodes.size() && count < 8;
           ni += std::max<std::size_t>(1, tree.gens[k].nodes.size() / 3)) {
        RatPoint x = middle_child(tree.j_of(k, tree.gens[k].nodes[ni])).center();
        auto est = maximal_lower(tree, x, tree.child_level(tree.params.K));
        const double w = to_double(est.density_at_x);
        single = std::max(single, est.lower / (nined * w));

        // One cube through x reaching into hump N+1: average of both masses.
        // In each hump's local frame the cube is [x - r, x - r + side].
        const Rational side = Rational(pow3_big(N + 1)) + 1;  // spans both humps
        RatBox local;
        local.dim = 1;
        local.lo[0] = x[0] - Rational(1, 2);
        local.hi[0] = local.lo[0] + side;
        Rational m1 = mass_in_box(tree, local);
        RatBox other;  // hump N+1 frame: shift by 3^N - 3^(N+1)
        other.dim = 1;
        other.lo[0] = local.lo[0] + Rational(pow3_big(N)) - Rational(pow3_big(N + 1));
        other.hi[0] = other.lo[0] + side;
        Rational m2 = mass_in_box(next, other);
        const double avg = to_double((m1 + m2) / side);
        cross = std::max(cross, avg / (nined * w));
        ++count;
      }
    }
    rep.Ns.push_back(N);
    rep.single_hump_ratio.push_back(single);
    rep.cross_correction.push_back(cross);
  }
  return rep;
}

RHSeries reverse_holder_series(int d, int N, int64_t A, const Rational& eps, int terms) {
  if (A < 1) throw SwlError(ErrorCode::Config, "A must be >= 1");
  if (eps <= 0) throw SwlError(ErrorCode::Config, "eps must be positive");
  RHSeries out;
  out.d = d;
  out.N = N;
  out.A = A;
  const BigInt num = boost::multiprecision::numerator(eps);
  const BigInt den = boost::multiprecision::denominator(eps);
  out.exact = den == 1;
  if (out.exact) {
    const int e = num.convert_to<int>();
    // rho = 3^(eps N d) A / (1+A)^(1+eps)
    Rational rho = Rational(pow3_big(e * N * d)) * A;
    BigInt dpow = 1;
    for (int i = 0; i < 1 + e; ++i) dpow *= BigInt(A) + 1;
    rho /= Rational(dpow);
    out.rho_exact = rho;
    out.rho = to_double(rho);
    out.diverges = rho > 1;
    Rational partial(0), pw(1);
    for (int k = 0; k <= terms; ++k) {
      pw *= rho;
      partial += pw;
      Rational scaled = partial / A;
      out.partials.push_back(to_double(scaled));
      out.partials_exact.push_back(rational_to_string(scaled));
    }
  } else {
    const double e = to_double(eps);
    const double rho = std::pow(3.0, e * N * d) * double(A) / std::pow(double(A) + 1, 1 + e);
    out.rho = rho;
    out.diverges = rho > 1;
    double partial = 0, pw = 1;
    for (int k = 0; k <= terms; ++k) {
      pw *= rho;
      partial += pw;
      out.partials.push_back(partial / double(A));
    }
  }
  return out;
}

Thm3Report thm3_equivalences_note(const HarnessParams& hp) {
  validate(hp);
  const double pprime = hp.p / (hp.p - 1);
  Thm3Report rep;
  const double nined = std::pow(9.0, hp.d);
  double lp = 0, rp = 0;
  rep.pointwise_ratio_lo = 1e300;
  rep.pointwise_ratio_hi = 0;
  for (int N = hp.N0; N <= hp.Nmax; ++N) {
    WeightTree tree = build_hump(hp, N, /*adjoint=*/false);
    // r_N = int_{Dhat} |Tw|^p' w^(1-p'); lhs replaces w^(1-p') by w/(Mw)^p'.
    const double rN = dhat_statistic(tree, pprime, hp.s, hp.threads);
    double lN = rN;  // WSubstitute: Mw = w on the support
    double ratio = 1;
    if (hp.mw_mode == MwMode::CertifiedUpper) {
      ratio = std::pow(nined, -pprime);
      lN = rN * ratio;
    }
    rep.pointwise_ratio_lo = std::min(rep.pointwise_ratio_lo, ratio);
    rep.pointwise_ratio_hi = std::max(rep.pointwise_ratio_hi, ratio);
    const double wN = std::pow(double(N), -hp.eps * pprime);
    lp += wN * lN;
    rp += wN * rN;
    rep.Ns.push_back(N);
    rep.lhs_terms.push_back(wN * lN);
    rep.rhs_terms.push_back(wN * rN);
    rep.lhs_partials.push_back(lp);
    rep.rhs_partials.push_back(rp);
  }
  rep.both_grow = rep.lhs_partials.size() >= 2 &&
                  rep.lhs_partials.back() > rep.lhs_partials.front() &&
                  rep.rhs_partials.back() > rep.rhs_partials.front();
  return rep;
}

}  // namespace swl
