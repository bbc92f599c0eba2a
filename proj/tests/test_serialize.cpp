#include <doctest.h>

#include <cmath>
#include <limits>

#include "hclab/errors.hpp"
#include "hclab/serialize.hpp"

using namespace hclab;

namespace {
ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Synthesis;  // sentinel: nothing thrown
}
}  // namespace

TEST_CASE("weight family round trip") {
  for (const auto& w : {WeightFamily::exp_power(0.5, {1.0, 2.0}), WeightFamily::poly_log({1.0, 2.0}, 3.0, 0.7),
                        WeightFamily::tabulate(WeightFamily::rolewicz({1.0, 2.0}), {1.0, 2.0}, 20)}) {
    WeightFamily b = weight_from_json(json::parse(to_json(w).dump()));
    CHECK(b.kind() == w.kind());
    CHECK(b.f(1.3, 17) == doctest::Approx(w.f(1.3, 17)).epsilon(1e-15));
  }
}

TEST_CASE("paramset round trip") {
  CurveMap f;
  f.points = {{1.0, 2.0}, {2.0, 1.0}};
  for (const auto& ps : {ParamSet::cube({1.0, 1.0}, 0.5), ParamSet::cantor(0.2, 2, {1.0, 1.0}, 1.0),
                         ParamSet::lipschitz_curve(f, 1.0), ParamSet::comb(7)}) {
    json j = to_json(ps);
    CHECK(to_json(paramset_from_json(json::parse(j.dump()))) == j);
  }
}

TEST_CASE("schedule round trip keeps entries and boxes") {
  CurveMap f;
  f.points = {{1.0, 2.0}, {2.0, 1.0}};
  LipschitzScheduleParams lp;
  lp.N = 4;
  lp.M = 4;
  Schedule s = lipschitz_schedule(ParamSet::lipschitz_curve(f, 1.0), lp);
  Schedule b = schedule_from_json(json::parse(to_json(s).dump()));
  REQUIRE(b.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(b.entries[k].n == s.entries[k].n);
    CHECK(b.entries[k].anchor == s.entries[k].anchor);
    CHECK(b.cells[k].box.lo == s.cells[k].box.lo);
  }
  CHECK(to_json(b)["checks"] == to_json(s)["checks"]);
}

TEST_CASE("tuples in dense and sparse form") {
  LogTuple t = tuple_from_json(json::parse(R"([[1, 0, -2], {"entries": [[5, -1000.5, -1]]}])"), 2, "u");
  CHECK(t[0].nnz() == 2);
  CHECK(t[0].value(2) == doctest::Approx(-2.0));
  CHECK(t[1].entries()[0].logmag == -1000.5);
  LogTuple b = tuple_from_json(json::parse(to_json(t).dump()), 2, "u");
  CHECK(tuple_dist(t, b, NormTag::sup()) == 0.0);
  CHECK(kind_of([] { (void)tuple_from_json(json::parse("[[1]]"), 2, "u"); }) == ErrorKind::Config);
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = json::parse(R"({"kind": "rolewicz", "domain": [1, 2], "alhpa": 1})");
  try {
    (void)weight_from_json(j);
    FAIL("expected Config");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("alhpa") != std::string::npos);
  }
}

TEST_CASE("non-finite numbers and exact doubles") {
  CHECK(number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(number_from(json("nan"), "x")));
  CHECK(std::stod(fmt_double(0.1)) == 0.1);
  CHECK(csv_field("a,b") == "\"a,b\"");
}
