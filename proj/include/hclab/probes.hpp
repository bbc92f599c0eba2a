#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hclab/logvec.hpp"
#include "hclab/paramsets.hpp"
#include "hclab/report.hpp"
#include "hclab/seqspace.hpp"

namespace hclab {

// psi(n) = (c_lower / 2) F(n): the separation rate of a product of shifts
// whose log-products satisfy |f_n(a) - f_n(b)| >= c_lower F(n) |a - b|.
double separation_rate(const WeightFamily& w, Index n);

struct SeparationResult {
  Status status = Status::NotApplicable;
  double lhs = 0.0;   // ||T_lambda^n u - T_mu^n u||
  double rhs = 0.0;   // psi(n) ||lambda - mu||
  double dist_lambda = 0.0;  // ||T_lambda^n u - v||
  double dist_mu = 0.0;
};

// Not applicable unless both orbits are delta-close to v.
SeparationResult separation_bound(const WeightFamily& w, const ProductParam& lambda, const ProductParam& mu,
                                  Index n, const LogTuple& u, const LogTuple& v, double delta,
                                  const NormTag& norm = NormTag::sup());

struct DiameterResult {
  double diameter = 0.0;  // sup-norm diameter of the hit set
  double bound = 0.0;     // 2 delta / psi(n)
  double grid_step = 0.0;
  std::size_t hits = 0;
  bool pass() const { return diameter <= bound + 2.0 * grid_step; }
};

// Scans grid points lambda with ||T_lambda^n u - v|| < delta.
DiameterResult admissible_diameter(const WeightFamily& w, const LogTuple& u, const LogTuple& v, Index n,
                                   double delta, const PointCloud& grid, double grid_step,
                                   const NormTag& norm = NormTag::sup());

// Uniform grid on [lo, hi] in one dimension.
PointCloud line_grid(double lo, double hi, double step);

struct GaugeFn {
  enum class Kind { Power, XOverLog2 };
  Kind kind = Kind::Power;
  double s = 1.0;  // exponent for Power
  double operator()(double x) const;
  // Largest x0 with phi nondecreasing and positive on (0, x0].
  double monotone_limit() const;
  static GaugeFn power(double s) { return {Kind::Power, s}; }
  static GaugeFn x_over_log2() { return {Kind::XOverLog2, 1.0}; }
};

std::string to_string(const GaugeFn& g);
GaugeFn parse_gauge(const std::string& s);  // "power:1.5", "x_over_log2"

// psi(n) = C n^alpha.
struct PowerRate {
  double C = 1.0;
  double alpha = 1.0;
  double operator()(Index n) const { return C * std::pow(static_cast<double>(n), alpha); }
};

enum class SeriesClass { Convergent, Divergent, Inconclusive };
const char* to_string(SeriesClass c);

struct GaugeSeriesResult {
  double partial_sum = 0.0;
  Index n_max = 0;
  // Terms behave like K n^{-p} (log n)^{-q}; convergent iff p > 1 or
  // p = 1 and q > 1.
  double p = 0.0;
  double q = 0.0;
  double observed_p = 0.0;  // fitted from the terms near n_max
  SeriesClass tail = SeriesClass::Inconclusive;
  Index first_in_range = 0;  // first n with 2 delta / psi(n) inside the monotone range
};

GaugeSeriesResult gauge_series(const GaugeFn& phi, const PowerRate& psi, double delta, Index n_max);
// Arbitrary rates give the partial sum and the fitted exponent only.
GaugeSeriesResult gauge_series(const GaugeFn& phi, const std::function<double(Index)>& psi, double delta,
                               Index n_max);

// Smallest integer n_j with n_j (1 - ((a_k - a_j)/a_k)^{1/alpha}) >= n_k.
// No backward jump (a_j >= a_k) leaves n_k; a_j <= 0 is infeasible.
Index saut_bound(double a_k, double a_j, double alpha, Index n_k);

enum class Ordering { First, Second, Third };
const char* to_string(Ordering o);
Ordering parse_ordering(const std::string& s);

// Dyadic cells of [1,2]^2 at depth m in the given order. First is row-major
// raster, second is boustrophedon, third is the recursive 2x2 block order.
std::vector<Box> ordered_cells(int m, Ordering o);

struct OrderingParams {
  int m = 5;
  double alpha = 0.4;
  Index N = 10;
  double slack = 2.0;  // admissible iff n_final^alpha <= 2^m slack
  // saut2 reference constant. A pair whose sup distance is at most twice
  // its backward jump gets D <= 2 a_k <= 4 from saut alone on [1,2]^2.
  double D_ref = 4.0;
};

struct OrderingExperiment {
  OrderingParams params;
  Ordering ordering = Ordering::Third;
  std::vector<Box> cells;
  std::vector<Index> n;
  Index n_final = 0;
  double threshold = 0.0;  // (2^m slack)^{1/alpha}
  bool admissible = false;
  double D_star = 0.0;   // max ||lambda - mu|| / ((n_j - n_k)/n_k)^alpha over k < j
  double D_local = 0.0;  // the same over consecutive cells only
  bool saut2 = false;    // D_star <= D_ref
  std::size_t saut_violations = 0;  // post hoc, should be 0
  double ratio() const { return static_cast<double>(n_final) / threshold; }
};

OrderingExperiment ordering_cost(const OrderingParams& p, Ordering o);

// Pairwise saut and spacing constraints of a sequence over ordered cells;
// returns the number of violated pairs.
std::size_t saut_violations(const std::vector<Box>& cells, const std::vector<Index>& n, double alpha, Index N);

// Realized saut2 constant of a sequence over ordered cells, over pairs
// with j - k <= max_lag.
double saut2_constant(const std::vector<Box>& cells, const std::vector<Index>& n, double alpha,
                      std::size_t max_lag = static_cast<std::size_t>(-1));

struct CombCount {
  int m = 0;
  std::int64_t count = 0;
  double lower = 0.0;     // (2^{m-1} - 1) 2^m / (m - 1)
  double realized_c = 0.0;  // count m / 4^m
};

// Exact count at box size 2^{-m}; teeth beyond depth m+1 add no boxes.
CombCount comb_count(int m);

// Upper bound 1/alpha on the Hausdorff dimension of any Lambda carrying a
// common hypercyclic vector; infinity without a power-scale lower bound.
double dimension_ceiling(const WeightFamily& w);

}  // namespace hclab
