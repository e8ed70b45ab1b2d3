#pragma once

#include <optional>
#include <set>

#include "swl/weight.hpp"

namespace swl {

struct MaximalEstimate {
  RatPoint x{};
  double lower = 0;          // best average found (guaranteed lower bound for Mw)
  RatBox witness;            // cube achieving it
  std::optional<double> certified_upper;
  Rational density_at_x;
};

/// Structured lower bound for Mw(x): triadic cubes through x at levels
/// 0..search_depth, their 3x and 9x concentric dilates, and per-scale offset
/// copies placing x at the 3^d third positions.
MaximalEstimate maximal_lower(const WeightTree& tree, const RatPoint& x, int search_depth);

struct CertificateReport {
  int generation = 0;
  int level = 0;                 // N(k+1)
  uint64_t total_cubes = 0;      // 3^(level*d), zero-mass cubes pass trivially
  uint64_t nonzero_checked = 0;
  uint64_t equality_tree_cubes = 0;  // expected A^(k+1)
  uint64_t equality_j_cubes = 0;     // expected A^k (the generation-k J-cubes)
  bool tree_cube_set_exact = false;
  bool j_cube_set_exact = false;
  std::vector<TriadicAddress> violations;
  bool pass() const {
    return violations.empty() && tree_cube_set_exact && j_cube_set_exact;
  }
};

/// Exhaustive exact check of the per-level mass bound w(L) <= alpha_k |L| at
/// level N(k+1). Equality holds exactly on the generation-(k+1) tree cubes
/// and on the generation-k J-cubes; anything else is a violation.
/// The optional mass override exists for fault-injection tests.
CertificateReport verify_claim21(
    const WeightTree& tree, int k, uint64_t guard = 10000000,
    const std::function<Rational(const TriadicAddress&)>& mass_fn = nullptr);

struct CertificateSet {
  std::set<int> generations;
  bool has(int k) const { return generations.count(k) != 0; }
};

/// 9^d alpha_k upper bound for Mw(x) on the support, valid once the claim
/// certificate for the covering generation has passed.
double certified_upper(const WeightTree& tree, const RatPoint& x, const CertificateSet& certs);

struct SeparationReport {
  bool ok = true;             // pairwise gap >= larger_side/4
  bool sharp_ok = true;       // pairwise gap >= larger_side (1/3 - 3^-N)
  Rational min_gap_over_side; // worst observed gap / larger side
  uint64_t pairs_checked = 0;
};
/// Pairwise separation of all J-cubes (exact L-infinity distances, pruned by
/// a spatial walk).
SeparationReport verify_separation(const WeightTree& tree);

// ---------------------------------------------------------------------------
// generic step weights (the S_v lemma machinery)

struct StepWeight {
  int d = 1;
  Rational h;        // cell side
  RatPoint origin{};
  int nx = 0, ny = 1;              // cells per axis (ny = 1 for d = 1)
  std::vector<Rational> values;    // row-major nonnegative cell values

  Rational value(int i, int j = 0) const { return values.at(std::size_t(j) * nx + i); }
  Rational total() const;
  Rational mass_in_interval(const Rational& a, const Rational& b) const;  // d = 1
};

/// d = 1: exact (optimal endpoints lie on breakpoints or at x).
/// d = 2: lower bound over grid-cornered squares (documented as such).
double step_maximal(const StepWeight& v, const RatPoint& x);

/// lhs and rhs of the S_v bound: cell-midpoint sums of
/// (M(chi_E v)/Mv)^2 v against v(E)^(1/2).
std::pair<double, double> sv_bound_check(const StepWeight& v, const std::vector<int>& cells_E);

}  // namespace swl
