#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "swl/quadrature.hpp"
#include "swl/singular.hpp"

using namespace swl;

namespace {

constexpr double kPi = 3.14159265358979323846;

BuildParams hilbert_params(int N, int K) {
  BuildParams bp;
  bp.d = 1;
  bp.N = N;
  bp.K = K;
  bp.kernel = riesz_kernel(1, 1);
  bp.cones = find_cones(bp.kernel);
  return bp;
}

}  // namespace

TEST_CASE("breakdown total equals the brute-force oracle (d=1)") {
  for (auto [N, K] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
    WeightTree t = build(hilbert_params(N, K));
    OperatorEvaluator ev(t);
    std::mt19937_64 rng(73);
    for (int rep = 0; rep < 8; ++rep) {
      const int k = int(rng() % uint64_t(K + 1));
      const std::size_t ni = rng() % t.gens[k].nodes.size();
      RatPoint x = middle_child(t.j_of(k, t.gens[k].nodes[ni])).center();
      OperatorBreakdown b = ev.breakdown(k, ni, x);
      const double oracle = brute_force_T(t, t.params.kernel, x, 1e-10);
      CHECK(std::abs(b.total - oracle) <= std::max(1e-6, 1e-3 * std::abs(b.total)));
      CHECK(b.total == doctest::Approx(b.I1 + b.I2 + b.II1 + b.II2 + b.III));
    }
  }
}

TEST_CASE("breakdown total equals the brute-force oracle (d=2 Riesz)") {
  BuildParams bp;
  bp.d = 2;
  bp.N = 2;
  bp.K = 1;
  bp.kernel = riesz_kernel(2, 1);
  bp.cones = find_cones(bp.kernel);
  WeightTree t = build(bp);
  OperatorEvaluator ev(t);
  std::mt19937_64 rng(79);
  for (int rep = 0; rep < 5; ++rep) {
    const int k = int(rng() % 2);
    const std::size_t ni = rng() % t.gens[k].nodes.size();
    RatPoint x = middle_child(t.j_of(k, t.gens[k].nodes[ni])).center();
    OperatorBreakdown b = ev.breakdown(k, ni, x);
    const double oracle = brute_force_T(t, t.params.kernel, x, 1e-9);
    CHECK(std::abs(b.total - oracle) <= std::max(1e-6, 1e-3 * std::abs(b.total)));
  }
}

TEST_CASE("single-cell weight reduces to the principal value") {
  auto bp = hilbert_params(3, 0);
  bp.truncation = Truncation::DropTail;  // support = J(root) only
  WeightTree t = build(bp);
  CHECK(support_cell_count(t) == 1);
  TriadicAddress j0 = t.j_of(0, t.gens[0].nodes[0]);
  RatPoint x = middle_child(j0).center();
  const double direct = brute_force_T(t, t.params.kernel, x, 1e-10);
  const double expected =
      to_double(t.alpha[0]) * pv_self_integral(t.params.kernel, to_dpoint(x, 1), j0);
  CHECK(direct == doctest::Approx(expected).epsilon(1e-12));
  // at the very center the window is symmetric and the value vanishes
  CHECK(std::abs(expected) < 1e-14);
}

TEST_CASE("sign alignment holds at every non-tie node") {
  for (auto [N, K] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {4, 1}}) {
    WeightTree t = build(hilbert_params(N, K));
    auto res = sign_alignment_check(t);
    CHECK(res.exhaustive);
    CHECK(res.mismatches == 0);
  }
  BuildParams bp;
  bp.d = 2;
  bp.N = 2;
  bp.K = 2;
  bp.kernel = riesz_kernel(2, 1);
  bp.cones = find_cones(bp.kernel);
  WeightTree t = build(bp);
  auto res = sign_alignment_check(t);
  CHECK(res.exhaustive);
  CHECK(res.mismatches == 0);
}

TEST_CASE("annulus diagnostics: frozen counts for d=1, N=3") {
  WeightTree t = build(hilbert_params(3, 1));
  OperatorEvaluator ev(t);
  auto an = ev.annuli(0, 0);
  REQUIRE(an.index.size() == 2);
  CHECK(an.index[0] == 1);
  CHECK(an.count[0] == 3);  // offsets 0,1,2 from the vertex
  CHECK(an.index[1] == 2);
  CHECK(an.count[1] == 6);  // offsets 3..8
  CHECK(an.total_children == 9);
  uint64_t sum = 0;
  for (auto c : an.count) sum += c;
  CHECK(sum == uint64_t(t.A));

  // harmonic sum: children at integer offsets 1..9 from the J center
  double H9 = 0;
  for (int i = 1; i <= 9; ++i) H9 += 1.0 / i;
  CHECK(an.harmonic_sum == doctest::Approx(H9).epsilon(1e-12));
}

TEST_CASE("annulus counts follow the full-cone scaling law (d=1)") {
  WeightTree t = build(hilbert_params(5, 0));
  OperatorEvaluator ev(t);
  auto an = ev.annuli(0, 0);
  for (std::size_t s = 0; s < an.index.size(); ++s) {
    const int i = an.index[s];
    if (i < 2) continue;
    if (an.radius_hi[s] * std::pow(3.0, t.child_level(0)) <= std::pow(3.0, t.params.N - 1)) {
      // interior shells: exactly 3^i - 3^(i-1) lattice points
      CHECK(int64_t(an.count[s]) == pow3_i64(i) - pow3_i64(i - 1));
    }
  }
}

TEST_CASE("II1 reconstructs from its own shell sums (Hilbert)") {
  WeightTree t = build(hilbert_params(3, 1));
  OperatorEvaluator ev(t);
  for (std::size_t ni : {std::size_t(0), std::size_t(4)}) {
    auto an = ev.annuli(1, ni);
    double absum = 0;
    for (double v : an.inv_dist_mass) absum += v;
    double ab;
    ev.ii1(1, ni, &ab);
    CHECK(ab == doctest::Approx(absum / kPi).epsilon(1e-12));
  }
}

TEST_CASE("JCenter reference gives the harmonic magnitude (Hilbert)") {
  WeightTree t = build(hilbert_params(3, 1));
  EvalOptions opts;
  opts.ii1_ref = II1Reference::JCenter;
  OperatorEvaluator ev(t, opts);
  double H = 0;
  for (int i = 1; i <= 9; ++i) H += 1.0 / i;
  const double expect = to_double(t.alpha[0]) * H / kPi;
  double v = ev.ii1(0, 0, nullptr);
  CHECK(std::abs(v) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ratio report: structure and the triangle inequality") {
  WeightTree t = build(hilbert_params(3, 1));
  EvalOptions opts;
  RatioReport rep = ratio_report(t, opts, 3);
  CHECK(rep.min_ratio > 0);
  CHECK(rep.min_ratio_per_gen.size() == 2);
  for (const auto& r : rep.rows) {
    const double disc = std::abs(r.b.I1 + r.b.II1);
    const double cont = std::abs(r.b.I2) + std::abs(r.b.II2) + std::abs(r.b.III);
    CHECK(std::abs(r.b.total) >= disc - cont - 1e-12);
    // the paper's sign coupling makes the discrete block at least |II1|
    if (r.b.i1_sign != 0) CHECK(disc >= std::abs(r.b.II1) * (1 - 1e-12));
  }
  const std::string csv = ratio_report_csv(rep);
  CHECK(csv.rfind("d,N,K,generation,node_id,x,I1,I2,II1,II2,III,total,ratio,ratio_over_N,quad_err",
                  0) == 0);
}

TEST_CASE("truncation sensitivity: coarse ratios move less than 5%") {
  WeightTree a = build(hilbert_params(3, 2));
  WeightTree b = build(hilbert_params(3, 3));
  OperatorEvaluator ea(a), eb(b);
  for (std::size_t ni = 0; ni < a.gens[0].nodes.size(); ++ni) {
    RatPoint x = middle_child(a.j_of(0, a.gens[0].nodes[ni])).center();
    const double ra = std::abs(ea.breakdown(0, ni, x).total);
    const double rb = std::abs(eb.breakdown(0, ni, x).total);
    CHECK(std::abs(ra - rb) / std::max(1e-30, ra) < 0.05);
  }
  // discrete pieces are identical bit for bit
  const auto& na = a.gens[1].nodes[2];
  const auto& nb = b.gens[1].nodes[2];
  CHECK(na.i1 == nb.i1);
  OperatorEvaluator ea1(a), eb1(b);
  CHECK(ea1.ii1(1, 2, nullptr) == eb1.ii1(1, 2, nullptr));
}

TEST_CASE("dhat statistic is positive and grows with N") {
  const double s4 = dhat_statistic(build(hilbert_params(4, 1)), 2.0, 1);
  const double s5 = dhat_statistic(build(hilbert_params(5, 1)), 2.0, 1);
  CHECK(s4 > 0);
  CHECK(s5 > s4);  // |Tw| ~ N w on the evaluation set
}
