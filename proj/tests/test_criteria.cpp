#include <doctest.h>

#include "hclab/criteria.hpp"
#include "hclab/errors.hpp"

using namespace hclab;

namespace {
Schedule one_dim(std::vector<Index> n, std::vector<double> a) {
  Schedule s;
  s.d = 1;
  for (std::size_t k = 0; k < n.size(); ++k) {
    ScheduleEntry e;
    e.n = n[k];
    e.anchor = {a[k]};
    s.entries.push_back(e);
    Cell c;
    c.box = Box{{a[k]}, {a[k]}};
    s.cells.push_back(c);
  }
  return s;
}
}  // namespace

TEST_CASE("caracstandard on a hand schedule") {
  // Weighted gaps 1.5*20 - 1*10 = 20 and 1.8*30 - 30 = 24.
  Schedule s = one_dim({10, 20, 30}, {1.0, 1.5, 1.8});
  ParamSet K = ParamSet::cube({1.49}, 0.0);  // inside [1.5 - 1/20, 1.5]
  CriterionReport r = check_caracstandard(s, K, 1.0, 10.0);
  CHECK(r.pass());
  CHECK(r.find("ii")->margin == doctest::Approx(10.0));
  CHECK(r.find("spacing")->margin == doctest::Approx(0.0));

  ParamSet far = ParamSet::cube({1.3}, 0.0);
  CriterionReport r2 = check_caracstandard(s, far, 1.0, 10.0);
  CHECK_FALSE(r2.pass());
  CHECK(r2.find("i")->status == Status::Fail);
}

TEST_CASE("walpha at alpha = 1 reduces to weighted gaps over all pairs") {
  Schedule s = one_dim({10, 20, 30}, {1.0, 1.5, 1.8});
  CriterionReport r = check_walpha(s, 1.0, 10.0);
  CHECK(r.pass());
  // Worst pair: a_j n_j - a_k n_k - N = 30 - 10 - 10 = 10 (k=1,j=2) and 24 - 10 = 14 (k=2,j=3).
  CHECK(r.clauses[0].margin == doctest::Approx(10.0));
}

TEST_CASE("walpha is strict, caracstandard ii is weak") {
  // a_2 n_2 - a_1 n_1 = 20 exactly equals N.
  Schedule s = one_dim({10, 20}, {1.0, 1.5});
  CHECK(check_walpha(s, 1.0, 20.0).clauses[0].status == Status::Fail);
  ParamSet K = ParamSet::cube({1.49}, 0.0);
  CHECK(check_caracstandard(s, K, 1.0, 10.0).pass());
  CHECK(check_caracstandard(s, K, 1.0, 20.0).find("ii")->status == Status::Pass);
}

TEST_CASE("walpha rejects alpha outside (0,1]") {
  Schedule s = one_dim({10, 20}, {1.0, 1.5});
  CHECK_THROWS_AS(check_walpha(s, 1.5, 1.0), Error);
}

TEST_CASE("hypothesis estimates classify Rolewicz and power-base") {
  HypothesisEstimate e = estimate_hypotheses(WeightFamily::rolewicz({1.0, 2.0}), {1.0, 2.0}, 1.0);
  CHECK(e.critere1);
  CHECK(e.C1_power == doctest::Approx(1.0).epsilon(1e-6));
  HypothesisEstimate g = estimate_hypotheses(WeightFamily::power_base({1.0, 2.0}), {1.0, 2.0}, 1.0);
  CHECK(g.critere2);
  CHECK_FALSE(g.critere1);
}

TEST_CASE("report pass needs every clause to pass") {
  CriterionReport r;
  r.add(weak_clause("x", 0.0, ""));
  CHECK(r.pass());
  r.add(strict_clause("y", 0.0, ""));
  CHECK_FALSE(r.pass());
}
