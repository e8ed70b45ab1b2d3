#pragma once

#include "swl/kernel.hpp"

namespace swl {

enum class ChildSelection { FullCone, CapCone };
enum class Truncation { LeafUniform, DropTail };
enum class TieBreak { Positive, Negative };
enum class I1Path { Auto, Direct, Hierarchical };

struct BuildParams {
  int d = 1;
  int N = 3;  // scale parameter, >= 2
  int K = 1;  // last fully built generation
  KernelSpec kernel;  // effective kernel; pass adjoint_of(base) with adjoint_flag
  ConeData cones;
  bool adjoint_flag = false;
  ChildSelection selection = ChildSelection::FullCone;
  Truncation truncation = Truncation::LeafUniform;
  TieBreak tie_break = TieBreak::Positive;
  double tie_eps = 1e-13;  // |I1| below tie_eps * (sum of |terms|) is a tie
  I1Path i1_path = I1Path::Auto;
  int threads = 0;  // 0 -> default
};

struct TreeNode {
  std::array<int64_t, kMaxDim> coords{};  // at level N*k
  double i1 = 0;
  int8_t i1_sign = 0;      // +1 / -1 / 0 (tie)
  uint8_t sigma_mask = 0;  // bit i set -> sigma_i = +1
};

struct Generation {
  std::vector<TreeNode> nodes;  // lexicographically sorted by coords
};

/// Finite-depth realization of w_N: generations 0..K of cone-selected triadic
/// cubes, exact rational densities alpha_k = a^(k+1) on the J-cubes, and
/// (LeafUniform) density alpha_K on the generation-(K+1) cubes.
struct WeightTree {
  BuildParams params;
  int64_t A = 0;  // child count, identical at every node
  Rational a;     // 3^(Nd) / (1+A)
  std::vector<Rational> alpha;  // alpha[k], k = 0..K
  std::vector<Generation> gens;
  std::vector<std::array<int64_t, kMaxDim>> child_offsets;  // selected m in [0,3^(N-1))^d
  Rational total_mass;

  int dim() const { return params.d; }
  int node_level(int k) const { return params.N * k; }
  int child_level(int k) const { return params.N * (k + 1); }

  SignVector sigma_of(const TreeNode& n) const;
  TriadicAddress node_addr(int k, const TreeNode& n) const;
  TriadicAddress hat_of(int k, const TreeNode& n) const;
  TriadicAddress j_of(int k, const TreeNode& n) const;
  RatPoint vertex_of(int k, const TreeNode& n) const;  // corner(hatQ, sigma)

  /// Child cube coordinates at level N(k+1), lexicographically sorted.
  std::vector<std::array<int64_t, kMaxDim>> children_coords(int k, const TreeNode& n) const;
  /// Child coordinate for one selected offset (no ordering guarantee).
  std::array<int64_t, kMaxDim> child_coord(int k, const TreeNode& n,
                                           const std::array<int64_t, kMaxDim>& m) const;

  const TreeNode* find_node(int k, const std::array<int64_t, kMaxDim>& coords) const;
  std::size_t node_index(int k, const std::array<int64_t, kMaxDim>& coords) const;

  /// Exact mass of any generation-k node cube (tail-adjusted under DropTail).
  Rational node_cube_mass(int k) const;
  Rational leaf_density() const;  // alpha[K] under LeafUniform
  uint64_t node_count() const;
};

WeightTree build(const BuildParams& params);

namespace detail {
/// Effective branch (+1/-1) of a node: its I1 sign, or the tie-break.
int8_t branch_of(const TreeNode& n, TieBreak tb);
/// sigma from the branch's cone direction: bit i set iff z_branch[i] > 0.
uint8_t sigma_mask_for_branch(const ConeData& cones, int d, int8_t branch);
}  // namespace detail

/// Structural classification of a triadic cube against the tree.
struct CubeContent {
  enum Kind { Outside, Uniform, NodeCube, Mixed } kind = Outside;
  int gen = -1;          // context generation for NodeCube / Mixed
  std::size_t node = 0;  // node index within gens[gen]
  Rational density;      // for Uniform
};
CubeContent resolve_cube(const WeightTree& tree, const TriadicAddress& B);

/// Exact w_N(L) by tree descent (the three cases of the mass-bound proof).
Rational cube_mass(const WeightTree& tree, const TriadicAddress& L);

/// Density alpha_k at x (half-open cube resolution), 0 off the support.
Rational density_at(const WeightTree& tree, const RatPoint& x);

struct RatBox {
  int dim = 1;
  RatPoint lo{};
  RatPoint hi{};
  Rational volume() const;
};
/// Exact mass of an axis-aligned rational box.
Rational mass_in_box(const WeightTree& tree, const RatBox& box);

/// Nonzero-mass triadic cubes at level N*k with their exact densities
/// (alpha index -1 denotes the unit density of generation-0 context).
struct LevelMassTable {
  int level = 0;
  int dim = 1;
  std::vector<std::array<int64_t, kMaxDim>> coords;  // lex sorted
  std::vector<int> alpha_gen;  // density generation: mass = alpha_of(g) * 3^(-level*d)
  std::vector<double> mass;
  std::vector<double> c0, c1, c2;  // centers in lattice units (coord + 0.5)
  Rational alpha_of_gen(const WeightTree& tree, int g) const;
};
LevelMassTable level_mass_table(const WeightTree& tree, int k);

/// Reference discrete sum: sum over same-size triadic siblings L != Q of
/// K(c_Q, c_L) w(L); independent of generations > k.
double i1_discrete(const WeightTree& tree, int k, const TreeNode& n);
double i1_discrete(const WeightTree& tree, int k, const TreeNode& n,
                   const LevelMassTable& table, double* abs_scale);

struct SupportCell {
  TriadicAddress addr;
  Rational density;
};
/// Visits all constant-density cells: J-cubes of generations 0..K, then
/// (LeafUniform) the generation-(K+1) cubes. Deterministic order.
void for_each_support_cell(const WeightTree& tree,
                           const std::function<void(const SupportCell&)>& fn);
uint64_t support_cell_count(const WeightTree& tree);

// Serialization (versioned JSON; bit-exact round-trip).
std::string serialize(const WeightTree& tree);
WeightTree deserialize(const std::string& text);
void save_tree(const WeightTree& tree, const std::string& path);  // atomic write
WeightTree load_tree(const std::string& path);

}  // namespace swl
