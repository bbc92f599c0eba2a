#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hclab/criteria.hpp"
#include "hclab/logvec.hpp"
#include "hclab/paramsets.hpp"
#include "hclab/schedule.hpp"

namespace hclab {

enum class ScheduleSource { Covering, Lipschitz };

const char* to_string(ScheduleSource s);
ScheduleSource parse_schedule_source(const std::string& s);

struct SynthesisParams {
  double eps = 0.1;
  ScheduleSource source = ScheduleSource::Covering;
  Index N_base = 1;
  int escalations = 3;  // doublings of N after a failed round
  Index truncation_cap = 10'000'000;
  BasicOptions basic;

  // Covering source: tau, delta, alpha, beta, D; N is set per round.
  CoveringParams covering;

  // Lipschitz source: tau and M chosen from eps when left at 0.
  double tau = 0.0;
  Index M = 0;
  std::size_t q_cap = 1'000'000;
};

struct Round {
  std::size_t target = 0;  // index into the target list
  std::size_t piece = 0;   // presubdivision piece (covering source)
  Index N = 0;
  int escalations = 0;
  Schedule schedule;
  CriterionReport report;  // BC1..BC5 for this round
  double achieved_eps = 0.0;  // largest clause norm
};

struct CandidateVector {
  int d = 1;
  NormTag norm = NormTag::sup();
  LogTuple u;
  LogTuple x;  // u plus every block S^{n_k}_{lambda_k} v
  std::vector<Round> rounds;
  Index support_width() const { return tuple_support_width(x); }
};

CandidateVector synthesize(const WeightFamily& w, const LogTuple& u, const std::vector<LogTuple>& targets,
                           const ParamSet& lambda, const SynthesisParams& p);

// For each sampled lambda and target: min over the target's rounds of
// ||T^{n_k}_lambda x - v|| over cells containing lambda. Clauses "BC1"
// (every sample lies in some cell), "orbits" and "ledger" (triangle
// inequality split at the anchors).
CriterionReport verify_orbits(const CandidateVector& x, const WeightFamily& w, const ParamSet& lambda,
                              const std::vector<LogTuple>& targets, double eps, std::size_t lambda_count);

}  // namespace hclab
