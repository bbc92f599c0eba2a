#include <doctest.h>

#include <cmath>

#include "hclab/errors.hpp"
#include "hclab/logvec.hpp"
#include "hclab/seqspace.hpp"

using namespace hclab;

namespace {
// Direct product of weights, independent of the closed forms.
double direct_f(const WeightFamily& w, double a, Index n) {
  double s = 0.0;
  for (Index j = 1; j <= n; ++j) s += w.log_weight(j, a);
  return s;
}
}  // namespace

TEST_CASE("closed forms agree with summed log weights") {
  const Interval dom{0.25, 3.0};
  for (const auto& w : {WeightFamily::exp_power(0.5, dom), WeightFamily::rolewicz(dom),
                        WeightFamily::poly_log(dom, 2.0, 0.5), WeightFamily::one_plus_over_n(dom),
                        WeightFamily::power_base(dom), WeightFamily::one_plus_power(0.5, dom)}) {
    for (Index n : {1, 2, 7, 100, 1000}) {
      CHECK(w.f(1.7, n) == doctest::Approx(direct_f(w, 1.7, n)).epsilon(1e-12));
      CHECK(w.log_product(1.7, 5, n) == doctest::Approx(direct_f(w, 1.7, n + 5) - direct_f(w, 1.7, 5)).epsilon(1e-11));
    }
  }
}

TEST_CASE("Rolewicz backward shift of a basis vector") {
  WeightFamily w = WeightFamily::rolewicz({0.5, 3.0});
  // (B^2 e_5)_3 = e^{2a} with f_n(a) = a n.
  TruncatedVector y = apply_backward(w, 1.5, TruncatedVector::basis(6, 5), 2);
  REQUIRE(y.size() == 4);
  CHECK(y.coeffs[3] == doctest::Approx(std::exp(3.0)));
  CHECK(y.coeffs[0] == 0.0);
  TruncatedVector z = apply_forward(w, 1.5, TruncatedVector::basis(2, 0), 3);
  REQUIRE(z.size() == 5);
  CHECK(z.coeffs[3] == doctest::Approx(std::exp(-4.5)));
}

TEST_CASE("norms") {
  TruncatedVector x({3.0, -4.0}, NormTag::ellp(2.0));
  CHECK(x.norm() == doctest::Approx(5.0));
  CHECK(TruncatedVector({3.0, -4.0}, NormTag::sup()).norm() == 4.0);
  CHECK(parse_norm_tag("l1") == NormTag::ellp(1.0));
  CHECK(parse_norm_tag("c0") == NormTag::sup());
  CHECK_THROWS_AS(parse_norm_tag("l0.5"), Error);
}

TEST_CASE("domain is enforced") {
  WeightFamily w = WeightFamily::exp_power(0.5, {1.0, 2.0});
  try {
    (void)w.f(2.5, 3);
    FAIL("expected Domain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("tabulated family reproduces its source at nodes and raises Range past the table") {
  WeightFamily src = WeightFamily::exp_power(0.5, {1.0, 2.0});
  WeightFamily t = WeightFamily::tabulate(src, {1.0, 1.5, 2.0}, 50);
  CHECK(t.f(1.5, 50) == doctest::Approx(src.f(1.5, 50)).epsilon(1e-13));
  try {
    (void)t.f(1.5, 51);
    FAIL("expected Range");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Range);
  }
}

TEST_CASE("log-domain blocks stay finite where doubles underflow") {
  WeightFamily w = WeightFamily::rolewicz({0.5, 3.0});
  LogTuple v(1);
  v[0].add(0, 0.0, 1);
  LogTuple b = tuple_forward(w, {2.0}, v, 100000);
  REQUIRE(b[0].nnz() == 1);
  CHECK(b[0].entries()[0].index == 100000);
  CHECK(b[0].entries()[0].logmag == doctest::Approx(-200000.0));
  LogTuple back = tuple_backward(w, {2.0}, b, 100000);
  CHECK(tuple_dist(back, v, NormTag::sup()) < 1e-9);
}

TEST_CASE("exact cancellation removes an entry") {
  LogSparseVector x;
  x.add(4, 0.3, 1);
  x.add(4, 0.3, -1);
  CHECK(x.empty());
  x.add(2, std::log(3.0), 1);
  x.add(2, std::log(1.0), -1);
  CHECK(x.value(2) == doctest::Approx(2.0));
}
