#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "swl/harness.hpp"

using namespace swl;

namespace {

HarnessParams small_params() {
  HarnessParams hp;
  hp.d = 1;
  hp.kernel_id = "hilbert";
  hp.p = 2.0;
  hp.eps = 0.75;
  hp.N0 = 3;
  hp.Nmax = 4;
  hp.K = 1;
  hp.s = 1;
  return hp;
}

}  // namespace

TEST_CASE("adjoint bookkeeping: I1 negates under the adjoint kernel") {
  BuildParams bp;
  bp.d = 1;
  bp.N = 3;
  bp.K = 1;
  bp.kernel = riesz_kernel(1, 1);
  bp.cones = find_cones(bp.kernel);
  WeightTree t = build(bp);

  WeightTree flipped = t;  // same geometry, adjoint kernel
  flipped.params.kernel = adjoint_of(t.params.kernel);
  for (std::size_t ni = 0; ni < t.gens[1].nodes.size(); ni += 2) {
    const double v = i1_discrete(t, 1, t.gens[1].nodes[ni]);
    const double va = i1_discrete(flipped, 1, flipped.gens[1].nodes[ni]);
    CHECK(va == doctest::Approx(-v).epsilon(1e-13));
  }

  // the adjoint-built tree mirrors the branch choice at the root
  BuildParams bpa = bp;
  bpa.kernel = adjoint_of(riesz_kernel(1, 1));
  bpa.cones = find_cones(bpa.kernel);
  bpa.adjoint_flag = true;
  WeightTree ta = build(bpa);
  CHECK(ta.sigma_of(ta.gens[0].nodes[0]).s[0] == -t.sigma_of(t.gens[0].nodes[0]).s[0]);
}

TEST_CASE("thm2: positivity and a sensible sweep") {
  HarnessParams hp = small_params();
  auto b = thm2_bundle(hp, 3);
  CHECK(b.thm2.positivity > 0);
  CHECK(b.thm2.lhs > 0);
  CHECK(b.thm2.rhs > 0);
  CHECK(b.thm2.lambda0 > 0);
  CHECK(b.thm2.duality_gap < 0.05);  // quadrature-level duality agreement
  CHECK(b.cond6.lhs > 0);
  CHECK(b.cond6.rhs > 0);
}

TEST_CASE("thm2: the weak-type ratio grows with N") {
  HarnessParams hp = small_params();
  auto a = thm2_bundle(hp, 3);
  auto b = thm2_bundle(hp, 4);
  CHECK(b.thm2.lhs / b.thm2.rhs > a.thm2.lhs / a.thm2.rhs);
  CHECK(b.cond6.lhs / b.cond6.rhs > a.cond6.lhs / a.cond6.rhs);
}

TEST_CASE("condition-6 ratio is scale invariant") {
  // homogeneity: both sides scale the same way in the weight, so the ratio
  // depends only on the shape; recomputing at another N keeps both finite
  HarnessParams hp = small_params();
  auto r = condition6_ratio(hp, 3);
  CHECK(std::isfinite(r.lhs / r.rhs));
  CHECK(r.lhs / r.rhs > 0);
}

TEST_CASE("hump gliding series: B is Cauchy, A tracks the reference") {
  HarnessParams hp = small_params();
  auto hs = hump_gliding_series(hp);
  REQUIRE(hs.B_bound_partials.size() >= 2);
  CHECK(hs.b_tail_at_10 < 1e-8);
  CHECK(hs.a_over_reference_min > 0);
  for (std::size_t i = 1; i < hs.A_partials.size(); ++i)
    CHECK(hs.A_partials[i] > hs.A_partials[i - 1]);
}

TEST_CASE("cross-hump decay obeys the calibrated bound") {
  HarnessParams hp = small_params();
  const double C = calibrate_cross_hump_C(hp);
  CHECK(C > 0);
  for (int N = hp.N0; N <= hp.Nmax; ++N)
    for (int J = hp.N0; J <= hp.Nmax; ++J) {
      if (N == J) continue;
      auto r = cross_hump_bound(hp, N, J, C);
      CHECK(r.actual <= r.bound * (1 + 1e-9));
    }
  // decay in the gap at fixed smaller index
  auto near = cross_hump_bound(hp, hp.N0, hp.N0 + 1, C);
  auto far = cross_hump_bound(hp, hp.N0, hp.N0 + 3, C);
  CHECK(far.actual < near.actual);
}

TEST_CASE("local A1: single-hump bracket holds, cross terms negligible") {
  HarnessParams hp = small_params();
  auto rep = local_a1_check(hp);
  for (std::size_t i = 0; i < rep.Ns.size(); ++i) {
    CHECK(rep.single_hump_ratio[i] <= 1.0 + 1e-9);
    CHECK(rep.cross_correction[i] < 1e-3);
  }
  // larger N0 shrinks the corrections
  HarnessParams hp2 = small_params();
  hp2.N0 = 4;
  hp2.Nmax = 5;
  auto rep2 = local_a1_check(hp2);
  CHECK(rep2.cross_correction[0] <= rep.cross_correction[0]);
}

TEST_CASE("reverse Holder series: the frozen divergent case") {
  auto rs = reverse_holder_series(1, 3, 9, Rational(1), 40);
  CHECK(rs.exact);
  CHECK(rs.rho_exact == Rational(243, 100));  // 3^3 * 9 / 100 = 2.43
  CHECK(rs.diverges);
  CHECK(rs.partials.back() > 1e6);
  // in exact arithmetic too
  Rational last = rational_from_string(rs.partials_exact.back());
  CHECK(last > 1000000);
}

TEST_CASE("reverse Holder series: eps = 0 analogue converges") {
  // rho = A/(1+A) < 1 mirrors the probability-mass geometric series; the
  // implementation requires eps > 0, so probe a tiny epsilon numerically
  auto rs = reverse_holder_series(1, 2, 3, Rational(1, 1000000), 60);
  CHECK(!rs.exact);
  CHECK(rs.rho < 1.0);
  CHECK(!rs.diverges);
}

TEST_CASE("reverse Holder rho grows with N") {
  auto a = reverse_holder_series(1, 3, 9, Rational(1), 5);
  auto b = reverse_holder_series(1, 4, 9, Rational(1), 5);
  CHECK(b.rho > a.rho);
}

TEST_CASE("thm3 equivalences: bracket and joint growth") {
  HarnessParams hp = small_params();
  auto rep = thm3_equivalences_note(hp);
  CHECK(rep.pointwise_ratio_lo >= std::pow(9.0, -hp.d * hp.p / (hp.p - 1)) - 1e-12);
  CHECK(rep.pointwise_ratio_hi <= 1.0 + 1e-12);
  CHECK(rep.both_grow);
  // p = 2 is self-conjugate: the rhs terms match the thm2 A-series terms
  auto hs = hump_gliding_series(hp);
  for (std::size_t i = 0; i < rep.Ns.size(); ++i)
    CHECK(rep.rhs_terms[i] ==
          doctest::Approx(std::pow(double(rep.Ns[i]), -hp.eps * 2.0) * hs.c_N[i]));
}
