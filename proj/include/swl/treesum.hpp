#pragma once

#include <mutex>
#include <unordered_map>

#include "swl/quadrature.hpp"
#include "swl/weight.hpp"

namespace swl {

/// Hierarchical summation of 1-d lattice point masses against the 1/(x-c)
/// kernel: triadic clusters carry scaled power moments; far clusters are
/// evaluated through a truncated Laurent series with a rigorous tail bound,
/// near clusters descend to SIMD leaf sums. Every d = 1 kernel here is a
/// multiple of 1/u, so this covers all d = 1 discrete sums.
class LatticePointSum {
 public:
  struct Result {
    double value = 0;      // sum of m_i / (x - c_i), lattice units
    double abs_value = 0;  // sum of m_i / |x - c_i|
    double err_bound = 0;  // rigorous bound on |value - exact|
  };

  /// coords: sorted lattice indices at `level`; masses aligned with coords.
  LatticePointSum(int level, std::vector<int64_t> coords, std::vector<double> masses,
                  int order = 20, int leaf_max = 48);

  /// x in lattice units; exclude the source at lattice index `exclude`
  /// (pass -1 to keep everything).
  Result evaluate(double x, int64_t exclude) const;

 private:
  struct Node {
    int64_t lo, hi;        // lattice index range [lo, hi)
    uint32_t begin, end;   // source subrange
    int32_t child[3];      // -1 = none
    int32_t mom;           // index into moments_, -1 for leaves
    double center, half;   // geometric center / half width in lattice units
  };
  int build(int64_t lo, int64_t hi, uint32_t begin, uint32_t end);
  void eval_rec(int node, double x, int64_t exclude, Result& r) const;

  int level_;
  int order_;
  int leaf_max_;
  std::vector<int64_t> coords_;
  std::vector<double> centers_;  // coords + 0.5
  std::vector<double> masses_;
  std::vector<Node> nodes_;
  std::vector<double> moments_;  // (order+1) scaled moments per internal node
  int root_ = -1;
};

/// Integral of K(x, .) against the tree weight over support-in-cube regions.
/// d = 1 uses exact log cell integrals plus Laurent far clusters (memoized
/// continuous moments); d = 2 descends to constant-density cells and the
/// Gauss-Legendre engine. The memo is mutex-guarded for concurrent readers.
class FieldEvaluator {
 public:
  struct Result {
    double value = 0;
    double err = 0;
  };

  FieldEvaluator(const WeightTree& tree, const KernelSpec& kernel, int order = 20,
                 double gl_rel_tol = 1e-9);

  /// Integral over support inside `region`, skipping everything inside
  /// `exclude` (pass nullptr for no exclusion). x must lie outside the
  /// closure of the evaluated mass region.
  Result integrate(const RatPoint& x, const TriadicAddress& region,
                   const TriadicAddress* exclude) const;

  /// Convenience: whole support except the subtree cube of node (k, idx).
  Result outside_node(const RatPoint& x, int k, std::size_t idx) const;
  /// The children region of node (k, idx) (support inside its middle child).
  Result children_region(const RatPoint& x, int k, std::size_t idx) const;
  /// Whole support except one constant-density cell (harness evaluations).
  Result except_cell(const RatPoint& x, const TriadicAddress& cell) const;

  const KernelSpec& kernel() const { return kernel_; }

 private:
  struct Frame;  // per-evaluation lattice frame
  void rec(const Frame& f, const TriadicAddress& B, const TriadicAddress* exclude,
           Result& r) const;
  void uniform_cell(const Frame& f, const TriadicAddress& B, double density, Result& r) const;
  const std::vector<double>& moments_of(const TriadicAddress& B) const;

  const WeightTree& tree_;
  KernelSpec kernel_;
  int order_;
  double gl_rel_tol_;
  double c_eff_ = 0;  // d = 1: kernel is c_eff / u
  int max_level_ = 0;

  mutable std::mutex memo_mu_;
  mutable std::unordered_map<uint64_t, std::vector<double>> memo_;  // cube key -> moments
};

/// Piecewise-constant field on disjoint 1-d cells (the harness test function
/// f); same hierarchical evaluation as FieldEvaluator with signed densities.
class CellField1D {
 public:
  struct Cell {
    int level;
    int64_t coord;
    double value;  // signed density
  };

  CellField1D(std::vector<Cell> cells, double c_eff, int order = 16, int leaf_max = 24);

  /// Integral of c_eff/(x-y) against the field over all cells except the one
  /// at `exclude_cell` (pass -1 to keep everything; the self cell's principal
  /// value is the caller's business). x in unit coordinates, exact rational.
  double evaluate(const Rational& x, std::ptrdiff_t exclude_cell) const;

  int fine_level() const { return fine_level_; }
  const std::vector<Cell>& cells() const { return cells_; }

 private:
  struct Node {
    int64_t lo, hi;
    uint32_t begin, end;
    int32_t child[3];
    int32_t mom;
    double center, half;
  };
  int build(int64_t lo, int64_t hi, uint32_t begin, uint32_t end);

  int fine_level_ = 0;
  int order_;
  int leaf_max_;
  double c_eff_;
  std::vector<Cell> cells_;           // sorted by position
  std::vector<int64_t> fine_lo_;      // cell lo in fine-lattice units
  std::vector<int64_t> fine_hi_;
  std::vector<Node> nodes_;
  std::vector<double> moments_;
  int root_ = -1;
};

}  // namespace swl
