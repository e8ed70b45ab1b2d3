#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "swl/weight.hpp"

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

BuildParams riesz2_params(int N, int K) {
  BuildParams bp;
  bp.d = 2;
  bp.N = N;
  bp.K = K;
  bp.kernel = riesz_kernel(2, 1);
  bp.cones = find_cones(bp.kernel);
  return bp;
}

}  // namespace

TEST_CASE("d=1 N=2 K=1 Hilbert: the hand-checked small tree") {
  WeightTree t = build(hilbert_params(2, 1));
  CHECK(t.A == 3);
  CHECK(t.a == Rational(9, 4));
  CHECK(t.alpha[0] == Rational(9, 4));
  CHECK(t.alpha[1] == Rational(81, 16));
  CHECK(t.gens[1].nodes.size() == 3);
  CHECK(t.total_mass == 1);

  // Root: empty sibling sum, tie resolved to the positive branch.
  const TreeNode& root = t.gens[0].nodes[0];
  CHECK(root.i1 == 0.0);
  CHECK(root.i1_sign == 0);
  CHECK(t.sigma_of(root).s[0] == 1);
  CHECK(t.j_of(0, root).lo(0) == Rational(2, 3));  // right-adjacent J

  // Generation 1 nodes are the subintervals of [1/3,2/3] at side 1/9.
  REQUIRE(t.gens[1].nodes.size() == 3);
  CHECK(t.gens[1].nodes[0].coords[0] == 3);
  CHECK(t.gens[1].nodes[1].coords[0] == 4);
  CHECK(t.gens[1].nodes[2].coords[0] == 5);

  // Hand-computed three-term I1 sums (masses 1/4 at cells 4,5,6 less self):
  // node 3: (1/4pi)(-9 - 9/2 - 3) = -33/(8 pi)
  // node 4: (1/4pi)(+9 - 9 - 9/2) = -9/(8 pi)
  // node 5: (1/4pi)(+9/2 + 9 - 9) = +9/(8 pi)
  CHECK(t.gens[1].nodes[0].i1 == doctest::Approx(-33.0 / (8 * kPi)).epsilon(1e-12));
  CHECK(t.gens[1].nodes[1].i1 == doctest::Approx(-9.0 / (8 * kPi)).epsilon(1e-12));
  CHECK(t.gens[1].nodes[2].i1 == doctest::Approx(9.0 / (8 * kPi)).epsilon(1e-12));
  CHECK(t.gens[1].nodes[0].i1_sign == -1);
  CHECK(t.gens[1].nodes[1].i1_sign == -1);
  CHECK(t.gens[1].nodes[2].i1_sign == 1);
  // sigma follows the branch: negative branch puts J on the left
  CHECK(t.sigma_of(t.gens[1].nodes[0]).s[0] == -1);
  CHECK(t.sigma_of(t.gens[1].nodes[2]).s[0] == 1);
}

TEST_CASE("masses: probability, J cell, off-support") {
  WeightTree t = build(hilbert_params(2, 1));
  CHECK(cube_mass(t, root_cube(1)) == 1);
  CHECK(cube_mass(t, t.j_of(0, t.gens[0].nodes[0])) == Rational(1, 4));
  CHECK(cube_mass(t, make_address(1, 2, {0})) == 0);  // [0,1/9] is dead frame
}

TEST_CASE("density examples") {
  WeightTree t = build(hilbert_params(2, 1));
  RatPoint x{};
  x[0] = Rational(25, 36);  // inside J(root) = [2/3, 7/9]
  CHECK(density_at(t, x) == t.alpha[0]);
  x[0] = Rational(1, 10);  // off support
  CHECK(density_at(t, x) == 0);
  // density is at least a > 1 wherever nonzero
  x[0] = t.j_of(1, t.gens[1].nodes[0]).center()[0];
  CHECK(density_at(t, x) >= t.a);
}

TEST_CASE("mass recursion holds exactly at every node") {
  for (auto bp : {hilbert_params(2, 2), hilbert_params(3, 1), riesz2_params(2, 1)}) {
    WeightTree t = build(bp);
    for (int k = 0; k <= t.params.K; ++k) {
      for (const auto& n : t.gens[k].nodes) {
        Rational lhs = cube_mass(t, t.node_addr(k, n));
        Rational rhs = cube_mass(t, t.j_of(k, n));
        for (const auto& c : t.children_coords(k, n)) {
          TriadicAddress a;
          a.dim = t.params.d;
          a.level = t.child_level(k);
          a.coords = c;
          rhs += cube_mass(t, a);
        }
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("level mass bound: exhaustive at small scale") {
  WeightTree t = build(hilbert_params(2, 1));
  // every triadic interval at level 2: w(L) <= alpha_0 |L|
  const Rational bound = t.alpha[0] / 9;
  int equalities = 0;
  for (int64_t c = 0; c < 9; ++c) {
    Rational m = cube_mass(t, make_address(1, 2, {c}));
    CHECK(m <= bound);
    if (m == bound) ++equalities;
  }
  CHECK(equalities == 4);  // three tree cubes plus J(root)
}

TEST_CASE("A-uniformity and the full-cone count") {
  WeightTree t = build(hilbert_params(3, 1));
  CHECK(t.A == 9);  // 3^(N-1)
  WeightTree r = build(riesz2_params(2, 1));
  CHECK(r.A == 9);  // 3^((N-1)d)
  for (const auto& n : r.gens[0].nodes) CHECK(r.children_coords(0, n).size() == 9);
}

TEST_CASE("I1 is independent of the build depth, bit for bit") {
  WeightTree a = build(hilbert_params(3, 1));
  WeightTree b = build(hilbert_params(3, 2));
  for (int k = 0; k <= 1; ++k) {
    REQUIRE(a.gens[k].nodes.size() == b.gens[k].nodes.size());
    for (std::size_t i = 0; i < a.gens[k].nodes.size(); ++i) {
      CHECK(a.gens[k].nodes[i].i1 == b.gens[k].nodes[i].i1);
      CHECK(a.gens[k].nodes[i].i1_sign == b.gens[k].nodes[i].i1_sign);
      CHECK(a.gens[k].nodes[i].sigma_mask == b.gens[k].nodes[i].sigma_mask);
    }
  }
}

TEST_CASE("support cells: counts and total") {
  WeightTree t = build(hilbert_params(2, 0));
  CHECK(support_cell_count(t) == 4);  // one J cell + three leaves
  Rational total(0);
  int count = 0;
  for_each_support_cell(t, [&](const SupportCell& c) {
    total += c.density * c.addr.volume();
    ++count;
  });
  CHECK(count == 4);
  CHECK(total == 1);

  WeightTree t1 = build(hilbert_params(2, 1));
  CHECK(support_cell_count(t1) == 1 + 3 + 9);
  Rational tot1(0);
  for_each_support_cell(t1, [&](const SupportCell& c) { tot1 += c.density * c.addr.volume(); });
  CHECK(tot1 == 1);
}

TEST_CASE("DropTail: truncated mass and the deep-query guard") {
  auto bp = hilbert_params(2, 1);
  bp.truncation = Truncation::DropTail;
  WeightTree t = build(bp);
  // J masses only: 1 - (A/(1+A))^(K+1) = 1 - (3/4)^2 = 7/16
  CHECK(t.total_mass == Rational(7, 16));
  CHECK(cube_mass(t, root_cube(1)) == Rational(7, 16));
  // queries below the truncation inside a dropped cube
  TriadicAddress deep;
  deep.dim = 1;
  deep.level = 5;
  // inside the first generation-2 tree cube region
  auto kid = t.children_coords(1, t.gens[1].nodes[0])[0];
  deep.coords[0] = kid[0] * 3 + 1;
  CHECK_THROWS_AS(cube_mass(t, deep), TooDeepError);
}

TEST_CASE("mass in boxes straddling the structure") {
  WeightTree t = build(hilbert_params(2, 1));
  RatBox b;
  b.dim = 1;
  b.lo[0] = Rational(0);
  b.hi[0] = Rational(1);
  CHECK(mass_in_box(t, b) == 1);
  b.lo[0] = Rational(2, 3);
  b.hi[0] = Rational(7, 9);  // exactly J(root)
  CHECK(mass_in_box(t, b) == Rational(1, 4));
  b.lo[0] = Rational(2, 3) + Rational(1, 18);  // half of J(root)
  CHECK(mass_in_box(t, b) == Rational(1, 8));
}

TEST_CASE("cap-cone selection in d=2 has uniform nonzero count") {
  BuildParams bp;
  bp.d = 2;
  bp.N = 2;
  bp.K = 1;
  bp.kernel = kernel_from_id("sin3");
  bp.cones = find_cones(bp.kernel);
  bp.selection = ChildSelection::CapCone;
  WeightTree t = build(bp);
  CHECK(t.A >= 1);
  CHECK(t.A < 9);
  CHECK(t.total_mass == 1);
  for (const auto& n : t.gens[1].nodes)
    CHECK(int64_t(t.children_coords(1, n).size()) == t.A);
}

TEST_CASE("full-cone selection is rejected for generic kernels") {
  BuildParams bp;
  bp.d = 2;
  bp.N = 2;
  bp.K = 0;
  bp.kernel = kernel_from_id("sin3");
  bp.cones = find_cones(bp.kernel);
  bp.selection = ChildSelection::FullCone;
  CHECK_THROWS_AS(build(bp), SwlError);
}
