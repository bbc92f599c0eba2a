#include <doctest.h>

#include <algorithm>

#include "hclab/constructor.hpp"
#include "hclab/errors.hpp"

using namespace hclab;

namespace {
LogTuple basis_sum(std::vector<std::vector<Index>> idx) {
  LogTuple t(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (Index j : idx[i]) t[i].add(j, 0.0, 1);
  return t;
}

ParamSet diagonal_curve() {
  CurveMap f;
  f.points = {{1.0, 2.0}, {2.0, 1.0}};
  return ParamSet::lipschitz_curve(f, 1.0);
}

// Covering t in [0,1] with steps tau/(C k M) takes about k0 e^{C M / tau}
// cells, so only short curves are affordable at these eps.
ParamSet short_curve() {
  CurveMap f;
  f.points = {{3.0, 3.01}, {3.01, 3.0}};
  return ParamSet::lipschitz_curve(f, 0.01);
}
}  // namespace

TEST_CASE("short curve synthesis verifies and keeps blocks disjoint") {
  WeightFamily w = WeightFamily::rolewicz({0.5, 3.5});
  ParamSet curve = short_curve();
  std::vector<LogTuple> targets{basis_sum({{0}, {0}}), basis_sum({{0, 1}, {0}})};
  SynthesisParams sp;
  sp.eps = 0.1;
  sp.source = ScheduleSource::Lipschitz;
  sp.N_base = 10;
  CandidateVector x = synthesize(w, {}, targets, curve, sp);
  REQUIRE(x.rounds.size() == 2);
  for (const auto& r : x.rounds) CHECK(r.report.pass());

  // Block supports [n_k, n_k + W) of different rounds never meet.
  std::vector<std::pair<Index, Index>> spans;
  for (const auto& r : x.rounds) {
    const Index W = tuple_support_width(targets[r.target]);
    for (const auto& e : r.schedule.entries) spans.emplace_back(e.n, e.n + W);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) CHECK(spans[i].first >= spans[i - 1].second);

  CriterionReport orbits = verify_orbits(x, w, curve, targets, sp.eps, 50);
  CHECK(orbits.pass());
  const Clause* ledger = orbits.find("ledger");
  REQUIRE(ledger != nullptr);
  CHECK(ledger->status == Status::Pass);
}

TEST_CASE("unit-length curve synthesis at eps = 0.1 exceeds the cell cap") {
  WeightFamily w = WeightFamily::rolewicz({0.5, 3.0});
  SynthesisParams sp;
  sp.eps = 0.1;
  sp.source = ScheduleSource::Lipschitz;
  sp.N_base = 10;
  try {
    (void)synthesize(w, {}, {basis_sum({{0}, {0}})}, diagonal_curve(), sp);
    FAIL("expected Capacity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("synthesis rejects mismatched target dimension") {
  WeightFamily w = WeightFamily::rolewicz({0.5, 3.0});
  SynthesisParams sp;
  sp.source = ScheduleSource::Lipschitz;
  CHECK_THROWS_AS(synthesize(w, {}, {basis_sum({{0}})}, diagonal_curve(), sp), Error);
}
