#pragma once

#include <memory>

#include "swl/treesum.hpp"

namespace swl {

struct OperatorBreakdown {
  RatPoint x{};
  int generation = 0;
  double I1 = 0, I2 = 0, II1 = 0, II2 = 0, III = 0;
  double total = 0;
  double quad_err = 0;
  Rational density;       // alpha_k at x
  int8_t i1_sign = 0;     // stored tree sign
  double ii1_abs = 0;     // sum of |terms| of II1
};

struct AnnulusDiagnostics {
  std::vector<int> index;             // annulus i (radii (3^(i-1), 3^i] x 3^-N(k+1))
  std::vector<uint64_t> count;        // #T^i_{k+1}(Q)
  std::vector<double> inv_dist_mass;  // sum over the shell of mass/|c_L - v|^d
  std::vector<double> radius_lo, radius_hi;
  double harmonic_sum = 0;  // full-cone: sum over children of 1/linf(c_L, c_J)^d (lattice units)
  uint64_t total_children = 0;
};

enum class II1Reference { Corner, JCenter };

struct EvalOptions {
  double rel_tol = 1e-6;
  II1Reference ii1_ref = II1Reference::Corner;  // JCenter is the Riesz cross-check variant
  int multipole_order = 20;
};

/// Five-piece evaluation of T w_N at points of the middle children of the
/// J-cubes, backed by the hierarchical field evaluator. Shares cached level
/// tables across evaluations; safe for concurrent use.
class OperatorEvaluator {
 public:
  OperatorEvaluator(const WeightTree& tree, EvalOptions opts = {});
  OperatorEvaluator(const WeightTree& tree, const KernelSpec& kernel, EvalOptions opts = {});

  OperatorBreakdown breakdown(int k, std::size_t node_idx, const RatPoint& x) const;
  double ii1(int k, std::size_t node_idx, double* abs_out = nullptr) const;
  AnnulusDiagnostics annuli(int k, std::size_t node_idx) const;

  /// T w at an arbitrary interior support point (harness use): field integral
  /// outside the constant-density cell plus the cell principal value.
  double value_at_support_point(const RatPoint& x, const TriadicAddress& cell,
                                const Rational& cell_density, double* err = nullptr) const;

  const LevelMassTable& table(int k) const;
  const FieldEvaluator& field() const { return *field_; }

 private:
  const WeightTree& tree_;
  KernelSpec kernel_;
  EvalOptions opts_;
  std::unique_ptr<FieldEvaluator> field_;
  mutable std::mutex table_mu_;
  mutable std::vector<std::unique_ptr<LevelMassTable>> tables_;
};

/// Independent oracle: direct summation over every constant-density support
/// cell (no decomposition, no hierarchy). x must lie in the open middle child
/// of its own cell.
double brute_force_T(const WeightTree& tree, const KernelSpec& kernel, const RatPoint& x,
                     double rel_tol = 1e-9, double* err_out = nullptr);

struct RatioRow {
  int generation = 0;
  uint64_t node = 0;
  RatPoint x{};
  OperatorBreakdown b;
  double ratio = 0;         // |total| / alpha_k
  double ratio_over_n = 0;  // ratio / N
  double cont_ratio = 0;    // (|I2|+|II2|+|III|) / alpha_k
};

struct RatioReport {
  int d = 0, N = 0, K = 0;
  std::vector<RatioRow> rows;
  std::vector<double> min_ratio_per_gen;
  double min_ratio = 0;
  double min_ratio_over_n = 0;
  double max_cont_ratio = 0;
};

/// Deterministic node sample (all nodes if <= 64, else lexicographic stride);
/// evaluation at the middle-child center plus 2^d corner-biased points when
/// samples_per_node > 1.
RatioReport ratio_report(const WeightTree& tree, const EvalOptions& opts, int samples_per_node,
                         int max_nodes_per_gen = 64, int threads = 0);

std::string ratio_report_csv(const RatioReport& rep);

struct SignCheckResult {
  uint64_t nodes_checked = 0;
  uint64_t mismatches = 0;
  uint64_t ties = 0;
  bool exhaustive = false;
};
/// sign(II1) == i1_sign at every non-tie node; exhaustive while the node*A
/// budget lasts, deterministic stride sample beyond it.
SignCheckResult sign_alignment_check(const WeightTree& tree, uint64_t budget = 200000000,
                                     int threads = 0);

/// Integral of |T w|^p w^(1-p) over the middle children of the J-cubes,
/// sampled on 3^s subcells per axis (the per-N statistic of the glued-weight
/// series).
double dhat_statistic(const WeightTree& tree, double p, int s, int threads = 0);

}  // namespace swl
