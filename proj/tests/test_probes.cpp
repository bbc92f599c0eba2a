#include <doctest.h>

#include <cmath>

#include "hclab/errors.hpp"
#include "hclab/probes.hpp"

using namespace hclab;

TEST_CASE("saut bound hand example") {
  // ((2 - 1.5) / 2)^{1/0.5} = 1/16, so n_j >= 150 * 16/15 = 160 exactly.
  CHECK(saut_bound(2.0, 1.5, 0.5, 150) == 160);
  CHECK(saut_bound(2.0, 1.5, 0.5, 151) == 162);  // 161.07 rounds up
  CHECK(saut_bound(1.5, 2.0, 0.5, 150) == 150);
  CHECK_THROWS_AS(saut_bound(1.5, 0.0, 0.5, 150), Error);
  try {
    (void)saut_bound(2.0, 1e-9, 1.0, Index{1} << 62);
    FAIL("expected Capacity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("diameter bound hand example") {
  // Rolewicz: psi(n) = n / 2, so 2 delta / psi(100) = 0.01 at delta = 0.25.
  WeightFamily w = WeightFamily::rolewicz({0.5, 2.5});
  CHECK(separation_rate(w, 100) == doctest::Approx(50.0));
  LogTuple u(1), v(1);
  u[0].add(100, -w.f(1.5, 100), 1);
  v[0].add(0, 0.0, 1);
  DiameterResult r = admissible_diameter(w, u, v, 100, 0.25, line_grid(1.0, 2.0, 1e-5), 1e-5);
  CHECK(r.bound == doctest::Approx(0.01));
  CHECK(r.hits > 0);
  CHECK(r.pass());
  // |e^{100(a - 1.5)} - 1| < 1/4 exactly on (1.5 + log(0.75)/100, 1.5 + log(1.25)/100).
  CHECK(r.diameter == doctest::Approx((std::log(1.25) - std::log(0.75)) / 100.0).epsilon(1e-3));
}

TEST_CASE("separation is not applicable far from v") {
  WeightFamily w = WeightFamily::rolewicz({0.5, 2.5});
  LogTuple u(1), v(1);
  u[0].add(10, 0.0, 1);
  v[0].add(0, 0.0, 1);
  SeparationResult r = separation_bound(w, {1.0}, {2.0}, 10, u, v, 0.25);
  CHECK(r.status == Status::NotApplicable);
}

TEST_CASE("separation bound holds near v") {
  WeightFamily w = WeightFamily::rolewicz({0.5, 2.5});
  LogTuple u(1), v(1);
  u[0].add(100, -w.f(1.5, 100), 1);
  v[0].add(0, 0.0, 1);
  SeparationResult r = separation_bound(w, {1.5}, {1.501}, 100, u, v, 0.25);
  CHECK(r.status == Status::Pass);
  CHECK(r.lhs >= r.rhs);
}

TEST_CASE("gauge classification boundaries") {
  CHECK(gauge_series(GaugeFn::power(3.0), {1.0, 1.0 / 3.0}, 0.5, 4096).tail == SeriesClass::Divergent);
  CHECK(gauge_series(GaugeFn::power(2.0), {1.0, 1.0}, 0.5, 4096).tail == SeriesClass::Convergent);
  CHECK(gauge_series(GaugeFn::x_over_log2(), {1.0, 1.0}, 0.5, 4096).tail == SeriesClass::Convergent);
  CHECK(gauge_series(GaugeFn::x_over_log2(), {1.0, 0.5}, 0.5, 4096).tail == SeriesClass::Divergent);
  auto any = gauge_series(GaugeFn::power(2.0), std::function<double(Index)>([](Index n) { return double(n); }), 0.5, 4096);
  CHECK(any.tail == SeriesClass::Inconclusive);
  CHECK(any.observed_p == doctest::Approx(2.0).epsilon(0.01));
  CHECK(to_string(parse_gauge("power:1.5")) == "power:1.5");
  CHECK(GaugeFn::x_over_log2().monotone_limit() == 1.0);  // increasing on (0,1)
}

TEST_CASE("orderings at m = 5") {
  OrderingParams p;
  OrderingExperiment first = ordering_cost(p, Ordering::First);
  OrderingExperiment third = ordering_cost(p, Ordering::Third);
  CHECK(first.n_final == 734739);
  CHECK(third.n_final == 12681);
  CHECK(third.threshold == doctest::Approx(32768.0));
  CHECK(third.admissible);
  CHECK_FALSE(first.admissible);
  CHECK(third.saut_violations == 0);
  CHECK(first.n.front() == p.N);
}

TEST_CASE("first ordering overflows at m = 8") {
  OrderingParams p;
  p.m = 8;
  try {
    (void)ordering_cost(p, Ordering::First);
    FAIL("expected Capacity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("dimension ceiling") {
  CHECK(dimension_ceiling(WeightFamily::exp_power(0.5, {1.0, 2.0})) == doctest::Approx(2.0));
  CHECK(std::isinf(dimension_ceiling(WeightFamily::power_base({1.0, 2.0}))));
}
