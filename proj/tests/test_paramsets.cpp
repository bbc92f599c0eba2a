#include <doctest.h>

#include <cmath>

#include "hclab/errors.hpp"
#include "hclab/paramsets.hpp"
#include "hclab/probes.hpp"

using namespace hclab;

TEST_CASE("cube cover constants and box counts") {
  ParamSet c = ParamSet::cube({1.0, 1.0}, 1.0);
  CoverConstants cc = cover_constants(c);
  CHECK(cc.r == 4);
  CHECK(cc.gamma == doctest::Approx(2.0));
  CHECK(box_count(c, 0.125) == 64);
}

TEST_CASE("cube cover passes diameter, nesting and coverage") {
  ParamSet c = ParamSet::cube({1.0, 1.0}, 1.0);
  c.sample_budget = 4096;
  CoverFamily f = build_cover(c, 3);
  CHECK(f.cells.size() == 64);
  CHECK(verify_cover(c, f).ok());
}

TEST_CASE("Cantor dimension") {
  ParamSet k = ParamSet::cantor(0.2, 2, {1.0, 1.0}, 1.0);
  CHECK(cover_constants(k).gamma == doctest::Approx(std::log(4.0) / std::log(5.0)));
  // Level-m pieces have side 5^{-m} and do not touch, so at eps = 5^{-m}
  // each falls in at most 4 grid boxes; at least one box each.
  const std::int64_t n = box_count(k, 1.0 / 125.0);
  CHECK(n >= 64);
  CHECK(n <= 4 * 64);
}

TEST_CASE("comb counts") {
  CombCount c = comb_count(5);
  CHECK(c.count == 290);
  CHECK(c.lower == doctest::Approx(120.0));
  CHECK(comb_count(3).count == 30);
}

TEST_CASE("curve samples contain the kink") {
  CurveMap f;
  f.points = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}};
  PointCloud pc = sample_curve(f, 0.25, 0.75, 0);
  Box b = Box::of(pc);
  CHECK(b.hi[1] == doctest::Approx(1.0));
  CHECK(b.lo[0] == doctest::Approx(0.5));
  CHECK(b.hi[0] == doctest::Approx(1.5));
}

TEST_CASE("invalid descriptors") {
  CHECK_THROWS_AS(ParamSet::cantor(0.6, 2).validate(), Error);
  CHECK_THROWS_AS(parse_set_kind("sphere"), Error);
}

TEST_CASE("third ordering visits BL, BR, TR, TL") {
  auto cells = ordered_cells(1, Ordering::Third);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].lo == std::vector<double>{1.0, 1.0});
  CHECK(cells[1].lo == std::vector<double>{1.5, 1.0});
  CHECK(cells[2].lo == std::vector<double>{1.5, 1.5});
  CHECK(cells[3].lo == std::vector<double>{1.0, 1.5});
}

TEST_CASE("box index matches brute force") {
  std::vector<Box> boxes{{{0.0, 0.0}, {1.0, 1.0}}, {{0.5, 0.5}, {2.0, 2.0}}, {{3.0, 3.0}, {3.0, 3.0}}};
  BoxIndex idx(boxes, 1e-12);
  const double p[2] = {0.75, 0.75};
  CHECK(idx.query(p) == std::vector<std::size_t>{0, 1});
  const double q[2] = {3.0, 3.0};
  CHECK(idx.query(q) == std::vector<std::size_t>{2});
  const double r[2] = {2.5, 0.1};
  CHECK_FALSE(idx.any(r));
}
