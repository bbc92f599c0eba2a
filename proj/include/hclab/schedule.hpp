#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hclab/paramsets.hpp"
#include "hclab/report.hpp"
#include "hclab/seqspace.hpp"

namespace hclab {

struct RecursionParams {
  double alpha = 1.0;
  double rho = 0.5;
  int r = 2;
  int m = 1;
  Index n1 = 1;
  Index A = 1;  // integer so that every n stays integral

  // Throws Invalid on bad ranges and Divergence when rho^{1/alpha} r >= 1.
  void validate() const;
};

// n over I_r^m in lexicographic order: entry t has base-r digits of t.
// n[0] = n1; n[t] = floor(n[t-1] / (1 - rho^{p/alpha})) + A where p is the
// 1-based position of the last nonzero digit of t.
std::vector<Index> build_sequence(const RecursionParams& p);

struct RecursionConstants {
  double c1 = 1.0;  // certified upper bound on prod_j (1-x^j)^{-(r-1) r^{j-1}}
  double c2 = 1.0;  // certified upper bound on sup_m D(m,1) / r^m
  double c1_partial = 1.0;  // partial product before the tail bound
  int terms = 0;
};

RecursionConstants recursion_constants(double alpha, double rho, int r);

// Exact auxiliary constants C(m,B), D(m,B) from their recurrences.
struct AuxConstants {
  long double C = 1.0L;
  long double D = 0.0L;
};
AuxConstants aux_constants(double alpha, double rho, int r, int m, double B = 1.0);

struct ScheduleConstants {
  double tau = 0.0;
  double N = 0.0;
  double D = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  double delta = 0.0;
};

struct ScheduleEntry {
  std::vector<int> digits;  // position in I_r^m (a single 1-based index for curve schedules)
  Index n = 0;
  ProductParam anchor;
};

struct Schedule {
  int r = 0;  // 0 when the cells are not indexed by I_r^m
  int m = 0;
  int d = 1;
  ScheduleConstants constants;
  std::vector<ScheduleEntry> entries;
  std::vector<Cell> cells;      // cells[k] is the cell of entries[k]
  std::vector<Clause> checks;   // verification attached by the builder

  std::size_t size() const { return entries.size(); }
  std::vector<Index> times() const;
  bool checks_pass() const;
};

struct CoveringParams {
  double tau = 1.0;
  double delta = 0.1;
  Index N = 1;
  double alpha = 0.5;
  double beta = 1.0;
  double D = 1.0;
  int m_cap = 64;
  bool allow_presubdivision = true;
  std::int64_t max_cells = std::int64_t{1} << 16;  // per piece; verification is quadratic
  std::size_t verify_budget = 40000;                // total samples over all pieces
};

// Intermediate quantities of the construction, kept for reports.
struct CoveringTrace {
  double c1 = 0.0, c2 = 0.0;
  double kappa = 0.0;
  int s = 0;
  Index A = 0;
  int m = 0;
  Index n1 = 0;
  double C_piece = 0.0;
};

struct CoveringSolution {
  int presubdivision_depth = 0;
  std::vector<ParamSet> pieces;
  std::vector<Schedule> schedules;  // one per piece
  CoveringTrace trace;              // identical across pieces (same C)
  CriterionReport verification;     // clauses a..e, minimum over pieces
};

// Covering of Lambda with a time schedule. Infeasible constraints raise Capacity
// (or Divergence for the exponent conditions) naming the inequality.
CoveringSolution solve_covering(const ParamSet& lambda, const CoveringParams& p);

// Pieces the covering is solved on: Lambda itself when C(Lambda) is small
// enough for D, otherwise its presubdivision.
std::vector<ParamSet> covering_pieces(const ParamSet& lambda, const CoveringParams& p, int* depth = nullptr);

// Properties (a)-(e) for one piece on its sample clouds.
std::vector<Clause> verify_covering(const Schedule& s, const ParamSet& piece);

struct LipschitzScheduleParams {
  double tau = 1.0;
  Index N = 1;
  Index M = 1;
  Index k0 = 1;  // first index; later synthesis rounds start past earlier supports
  std::size_t q_cap = 1'000'000;
  int interior_samples = 2;  // extra curve samples per cell besides endpoints and kinks
};

// n_k = kM for k >= k0, t_{k0} = 0, t_{k+1} = t_k + tau/(C n_k); cells
// f([t_k, t_{k+1}]).
Schedule lipschitz_schedule(const ParamSet& curve, const LipschitzScheduleParams& p);

// Refills cell samples of a schedule read back from disk: each sample of K
// goes to every cell whose box contains it.
void attach_samples(Schedule& s, const ParamSet& K);

// Maximum sup distance from the anchor to the cell bounding box.
double anchor_reach(const ProductParam& anchor, const Box& box);

}  // namespace hclab
