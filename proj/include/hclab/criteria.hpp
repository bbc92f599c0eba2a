#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hclab/logvec.hpp"
#include "hclab/paramsets.hpp"
#include "hclab/report.hpp"
#include "hclab/schedule.hpp"
#include "hclab/seqspace.hpp"

namespace hclab {

// Absolute slack for sampled points on the boundary of an anchored box.
inline constexpr double kBoxTol = 1e-12;

// Clauses: "spacing" (n_1 >= N, gaps >= N), "i" (coverage of K by the
// anchored boxes), "ii" (consecutive weighted gaps >= N).
CriterionReport check_caracstandard(const Schedule& s, const ParamSet& K, double tau, double N);

// Clause "walpha": all pairs k < j and coordinates, strict.
CriterionReport check_walpha(const Schedule& s, double alpha, double N);

struct CaracOptions {
  NormTag norm = NormTag::sup();
  std::size_t pair_budget = 200'000'000;  // (k, j, i, l) terms for clause iii
};

// Clauses "i", "ii", "iii" of the general characterization, in log domain.
CriterionReport check_carac_general(const Schedule& s, const WeightFamily& w, const std::function<double(Index)>& F,
                                    const ParamSet& K, double tau, Index N, double eps,
                                    const CaracOptions& opt = {});

struct BasicOptions {
  int lambda_per_axis = 5;  // up to lambda_per_axis^d samples per cell
  NormTag norm = NormTag::sup();
  std::size_t eval_budget = 500'000'000;  // shifted coefficients summed in BC3
};

// Clauses "BC1".."BC5". u and v are d-tuples.
CriterionReport check_basic_criterion(const Schedule& s, const WeightFamily& w, const LogTuple& u, const LogTuple& v,
                                      double eps, const ParamSet& K, const BasicOptions& opt = {});

// Deterministic subsample of at most `count` cell samples.
std::vector<ProductParam> lambda_samples(const Cell& cell, std::size_t count);

struct HypothesisGrid {
  int a_points = 9;
  Index n_max = 10'000;
  int per_decade = 20;
};

struct HypothesisEstimate {
  double alpha = 1.0;
  double C1_power = 0.0;  // max |f_n(a)-f_n(b)| / (n^alpha |a-b|)
  double C1_log = 0.0;    // max over n >= 2 of |f_n(a)-f_n(b)| / (log n |a-b|)
  double C2_power = 0.0, C3 = 0.0;    // inf_a f_n(a) >= log C2 + C3 n^alpha on the grid
  double C2_log = 0.0, kappa = 0.0;   // inf_a f_n(a) >= log C2 + kappa log n on the grid
  bool critere1 = false;  // power-Lipschitz with stretched-exponential growth
  bool critere2 = false;  // log-Lipschitz with polynomial growth
  std::vector<std::string> diagnostics;
};

HypothesisEstimate estimate_hypotheses(const WeightFamily& w, Interval I, double alpha, const HypothesisGrid& grid = {});

}  // namespace hclab
