#include <doctest.h>

#include <cmath>

#include "hclab/errors.hpp"
#include "hclab/schedule.hpp"

using namespace hclab;

TEST_CASE("sequence hand oracle") {
  // x = rho^{1/alpha} = 1/16; t=1 and t=3 end in digit position 2, t=2 in 1.
  //   floor(100 / (1 - 1/256)) + 10 = 110
  //   floor(110 / (1 - 1/16)) + 10 = 127
  //   floor(127 / (1 - 1/256)) + 10 = 137
  RecursionParams p;
  p.alpha = 0.5;
  p.rho = 0.25;
  p.r = 2;
  p.m = 2;
  p.n1 = 100;
  p.A = 10;
  CHECK(build_sequence(p) == std::vector<Index>{100, 110, 127, 137});
}

TEST_CASE("sequence divergence and overflow") {
  RecursionParams p;
  p.alpha = 1.0;
  p.rho = 0.5;
  p.r = 2;
  try {
    p.validate();
    FAIL("expected Divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
  }
  p.rho = 0.1;
  p.r = 4;
  p.m = 20;
  try {
    (void)build_sequence(p);
    FAIL("expected Capacity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("c1 bounds the infinite product from above, tightly") {
  // prod_j (1 - x^j)^{-(r-1) r^{j-1}} with x = 0.1, r = 2, summed to 60 terms.
  long double logp = 0.0L;
  for (int j = 1; j <= 60; ++j) logp -= std::pow(2.0L, j - 1) * std::log1p(-std::pow(0.1L, j));
  const double oracle = static_cast<double>(std::exp(logp));
  RecursionConstants rc = recursion_constants(1.0, 0.1, 2);
  CHECK(rc.c1 >= oracle);
  CHECK(rc.c1 <= oracle * (1.0 + 1e-9));
  CHECK(oracle == doctest::Approx(1.1394).epsilon(1e-3));
}

TEST_CASE("aux constants at m = 1") {
  // C(1,B) = (1 - B^{1/alpha} x)^{-(r-1)}, D(1,B) = r C(1,B); x = 0.2, r = 3.
  AuxConstants c = aux_constants(1.0, 0.2, 3, 1, 1.0);
  CHECK(static_cast<double>(c.C) == doctest::Approx(1.5625));
  CHECK(static_cast<double>(c.D) == doctest::Approx(4.6875));
}

TEST_CASE("lipschitz schedule times") {
  // t_{k+1} = t_k + tau / (C k M): with tau = C = 1, M = 4, k0 = 1 the
  // first cells end at 1/4 and 3/8.
  CurveMap f;
  f.points = {{1.0, 2.0}, {2.0, 1.0}};
  ParamSet curve = ParamSet::lipschitz_curve(f, 1.0);
  LipschitzScheduleParams lp;
  lp.tau = 1.0;
  lp.N = 4;
  lp.M = 4;
  Schedule s = lipschitz_schedule(curve, lp);
  REQUIRE(s.size() > 3);
  CHECK(s.entries[0].n == 4);
  CHECK(s.entries[1].n == 8);
  CHECK(s.cells[0].box.lo[0] == doctest::Approx(1.0));
  CHECK(s.cells[0].box.hi[0] == doctest::Approx(1.25));
  CHECK(s.cells[1].box.hi[0] == doctest::Approx(1.375));
  // Anchor is the coordinate-wise max of the cell.
  CHECK(s.entries[1].anchor[0] == doctest::Approx(1.375));
  CHECK(s.entries[1].anchor[1] == doctest::Approx(1.75));
  // Harmonic steps: the last cell index q satisfies H_q - 1 ~ C M / tau = 4.
  CHECK(s.size() > 20);
  CHECK(s.size() < 40);
  CHECK(s.checks_pass());
}

TEST_CASE("attach_samples refills cells of a bare schedule") {
  CurveMap f;
  f.points = {{1.0, 2.0}, {2.0, 1.0}};
  ParamSet curve = ParamSet::lipschitz_curve(f, 1.0);
  LipschitzScheduleParams lp;
  lp.tau = 1.0;
  lp.N = 10;
  lp.M = 12;
  Schedule s = lipschitz_schedule(curve, lp);
  for (auto& c : s.cells) c.samples = PointCloud(2);
  attach_samples(s, curve);
  std::size_t filled = 0;
  for (const auto& c : s.cells) filled += c.samples.empty() ? 0 : 1;
  CHECK(filled > s.size() / 2);
}

TEST_CASE("covering on a small cube passes (a)-(e)") {
  CoveringParams p;
  p.alpha = 0.4;
  p.beta = 0.9;
  p.delta = 0.1;
  p.N = 10;
  p.D = 1.0;
  p.tau = 128.0;
  p.verify_budget = 4000;
  CoveringSolution sol = solve_covering(ParamSet::cube({1.0, 1.0}, 1.0), p);
  CHECK(sol.verification.pass());
  for (const char* id : {"a", "b", "c", "d", "e"}) CHECK(sol.verification.find(id) != nullptr);
  for (const auto& s : sol.schedules)
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s.entries[k].n >= s.entries[k - 1].n + p.N);
}
