#pragma once

#include "swl/maximal.hpp"
#include "swl/singular.hpp"

namespace swl {

enum class MwMode { WSubstitute, CertifiedUpper, MaximalLower };

struct HarnessParams {
  int d = 1;
  std::string kernel_id = "hilbert";
  double p = 2.0;     // 1 < p < inf
  double eps = 0.75;  // 1/p < eps < 1
  int N0 = 4;
  int Nmax = 7;
  int K = 1;
  int s = 1;  // sub-resolution: each support cell split 3^s-fold per axis
  MwMode mw_mode = MwMode::WSubstitute;
  int threads = 0;
};

struct Thm2Result {
  int N = 0;
  double lhs = 0;      // sup_lambda lambda w({|Tf| > lambda})
  double rhs = 0;      // integral of |f| Mw
  double lambda0 = 0;
  double positivity = 0;   // integral of |T*w/Mw|^2 w (must be > 0)
  double duality_gap = 0;  // |int Tf w - int f T*w| relative
};
/// Conjecture-1 mechanism: adjoint-built tree, f = w T*w/(Mw)^2 on
/// sub-resolved cells, exact lambda sweep over the discrete distribution.
Thm2Result thm2_ratio(const HarnessParams& hp, int N);

struct Cond6Result {
  int N = 0;
  double lhs = 0;  // integral of |Tf|^p w
  double rhs = 0;  // integral of |f|^p (Mw/w)^p w
};
Cond6Result condition6_ratio(const HarnessParams& hp, int N);

struct Thm2Bundle {
  Thm2Result thm2;
  Cond6Result cond6;
};
/// Both statistics from one tree build and one Tf pass.
Thm2Bundle thm2_bundle(const HarnessParams& hp, int N);

struct HumpSeries {
  std::vector<int> Ns;              // N0..Nmax (tree-backed range)
  std::vector<double> c_N;          // dhat statistics
  std::vector<double> A_partials;   // sum N^(-eps p) c_N
  std::vector<double> B_bound_partials;
  std::vector<double> reference_partials;  // sum N^(p(1-eps))
  double b_tail_at_10 = 0;          // Cauchy tail of the B series at N0+10
  double a_over_reference_min = 0;  // min over the range of A/reference
};
HumpSeries hump_gliding_series(const HarnessParams& hp);

struct CrossHumpResult {
  int N = 0, J = 0;
  double actual = 0;
  double bound = 0;
};
/// Kernel decay across glued humps: |T w~_J| on Q_N against C 3^(-dN/2) 3^(-dJ/2).
CrossHumpResult cross_hump_bound(const HarnessParams& hp, int N, int J, double calibrated_C);
/// C from the smallest admissible pair (N0, N0+1), then fixed.
double calibrate_cross_hump_C(const HarnessParams& hp);

struct LocalA1Report {
  std::vector<int> Ns;
  std::vector<double> single_hump_ratio;  // max of maximal_lower/(9^d w), <= 1 expected
  std::vector<double> cross_correction;   // cross-hump cube average / (9^d w(x))
};
LocalA1Report local_a1_check(const HarnessParams& hp);

struct RHSeries {
  int d = 0, N = 0;
  int64_t A = 0;
  double rho = 0;
  bool exact = false;      // eps integral -> exact rational arithmetic
  Rational rho_exact;      // valid when exact
  bool diverges = false;   // rho > 1
  std::vector<double> partials;
  std::vector<std::string> partials_exact;  // rational strings when exact
};
RHSeries reverse_holder_series(int d, int N, int64_t A, const Rational& eps, int terms);

struct Thm3Report {
  std::vector<int> Ns;
  std::vector<double> lhs_terms;   // weighted (11)-form integrand via Mw mode
  std::vector<double> rhs_terms;   // w^(1-p') form
  std::vector<double> lhs_partials, rhs_partials;
  double pointwise_ratio_lo = 0, pointwise_ratio_hi = 0;  // in [9^(-d p'), 1]
  bool both_grow = false;
};
Thm3Report thm3_equivalences_note(const HarnessParams& hp);

}  // namespace swl
