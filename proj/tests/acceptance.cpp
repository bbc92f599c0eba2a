// Acceptance harness: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance --only k   run criterion k (exit status 1 on FAIL)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fmt/format.h>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hclab/constructor.hpp"
#include "hclab/criteria.hpp"
#include "hclab/errors.hpp"
#include "hclab/logvec.hpp"
#include "hclab/paramsets.hpp"
#include "hclab/probes.hpp"
#include "hclab/schedule.hpp"
#include "hclab/seqspace.hpp"

using namespace hclab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string worst_clause(const CriterionReport& r) {
  const Clause* w = nullptr;
  for (const auto& c : r.clauses)
    if (!w || c.margin < w->margin) w = &c;
  if (!w) return "no clauses";
  return fmt::format("min margin {:.3g} at {} ({})", w->margin, w->id, w->witness);
}

// ---------------------------------------------------------------- 1

Outcome inverse_identity() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Interval dom{0.25, 3.0};
  std::vector<WeightFamily> fams{WeightFamily::exp_power(0.5, dom),     WeightFamily::exp_power(1.0 / 3.0, dom),
                                 WeightFamily::one_plus_power(0.5, dom), WeightFamily::rolewicz(dom),
                                 WeightFamily::poly_log(dom, 2.0, 0.5),  WeightFamily::one_plus_over_n(dom),
                                 WeightFamily::power_base(dom)};
  fams.push_back(WeightFamily::tabulate(WeightFamily::exp_power(0.5, dom), {0.25, 1.0, 2.0, 3.0}, 256));
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const WeightFamily& w = fams[trial % fams.size()];
    const double a = dom.lo + (dom.hi - dom.lo) * U(rng);
    const auto n = static_cast<Index>(1 + rng() % 64);
    const std::size_t L = 1 + rng() % 32;
    std::vector<double> c(L);
    for (auto& v : c) v = (U(rng) < 0.2) ? 0.0 : (2.0 * U(rng) - 1.0) * std::pow(10.0, 4.0 * U(rng) - 2.0);
    TruncatedVector x(c, NormTag::sup());
    TruncatedVector y = apply_backward(w, a, apply_forward(w, a, x, n), n);
    if (y.size() != L) return {false, fmt::format("length {} != {} at trial {}", y.size(), L, trial)};
    for (std::size_t i = 0; i < L; ++i) {
      const double err = c[i] == 0.0 ? std::fabs(y.coeffs[i]) : std::fabs(y.coeffs[i] - c[i]) / std::fabs(c[i]);
      worst = std::max(worst, err);
    }
  }
  return {worst <= 1e-12, fmt::format("max relative error {:.3g} over 1000 tuples", worst)};
}

// ---------------------------------------------------------------- 2

Outcome sequence_bound() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int violations = 0;
  double tightest = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    RecursionParams p;
    p.alpha = 0.3 + 0.6 * U(rng);
    p.r = 2 + static_cast<int>(rng() % 3);
    p.m = 1 + static_cast<int>(rng() % 8);
    // rho^{1/alpha} r uniform in (0.02, 0.98).
    const double x = (0.02 + 0.96 * U(rng)) / p.r;
    p.rho = std::pow(x, p.alpha);
    p.n1 = 1 + static_cast<Index>(rng() % 1'000'000);
    p.A = 1 + static_cast<Index>(rng() % 1000);
    auto seq = build_sequence(p);
    RecursionConstants rc = recursion_constants(p.alpha, p.rho, p.r);
    const long double bound = static_cast<long double>(rc.c1) * p.n1 +
                              static_cast<long double>(rc.c2) * std::pow(static_cast<long double>(p.r), p.m) * p.A;
    Index mx = *std::max_element(seq.begin(), seq.end());
    if (static_cast<long double>(mx) > bound) ++violations;
    tightest = std::max(tightest, static_cast<double>(mx / bound));
  }
  return {violations == 0, fmt::format("{} violations, largest max/bound {:.4f}", violations, tightest)};
}

// ---------------------------------------------------------------- 3

Outcome covering_cube() {
  ParamSet lambda = ParamSet::cube({1.0, 1.0}, 1.0);
  CoveringParams p;
  p.alpha = 0.4;
  p.beta = 0.9;
  p.delta = 0.1;
  p.N = 10;
  p.D = 1.0;
  p.tau = 128.0;
  p.verify_budget = 200 * 200;
  CoveringSolution sol = solve_covering(lambda, p);
  std::size_t q = 0;
  for (const auto& s : sol.schedules) q += s.size();
  return {sol.verification.pass(),
          fmt::format("depth {} ({} pieces), m = {}, {} cells, n_max = {}; {}", sol.presubdivision_depth,
                      sol.pieces.size(), sol.trace.m, q, sol.schedules.back().entries.back().n,
                      worst_clause(sol.verification))};
}

// ---------------------------------------------------------------- 4

Outcome curve_pipeline() {
  CurveMap f;
  f.kind = CurveMap::Kind::Polyline;
  f.points = {{1.0, 2.0}, {2.0, 1.0}};
  ParamSet curve = ParamSet::lipschitz_curve(f, 1.0);
  WeightFamily w = WeightFamily::rolewicz({0.5, 3.0});

  LipschitzScheduleParams lp;
  lp.tau = 1.0;
  lp.N = 10;
  lp.M = 12;
  Schedule s = lipschitz_schedule(curve, lp);
  CriterionReport carac = check_caracstandard(s, curve, lp.tau, static_cast<double>(lp.N));
  std::string head = fmt::format("lipschitz_schedule q = {} caracstandard {}", s.size(), carac.pass() ? "pass" : "FAIL");
  if (!carac.pass()) return {false, head + "; " + worst_clause(carac)};

  LogTuple e00(2), e10(2);
  e00[0].add(0, 0.0, 1);
  e00[1].add(0, 0.0, 1);
  e10[0].add(0, 0.0, 1);
  e10[0].add(1, 0.0, 1);
  e10[1].add(0, 0.0, 1);
  SynthesisParams sp;
  sp.eps = 0.1;
  sp.source = ScheduleSource::Lipschitz;
  // Smallest clearance the targets allow; M then comes from the tail budget.
  sp.N_base = 1;
  sp.truncation_cap = 1'000'000;
  sp.q_cap = 1'000'000;
  try {
    CandidateVector x = synthesize(w, {}, {e00, e10}, curve, sp);
    CriterionReport orbits = verify_orbits(x, w, curve, {e00, e10}, sp.eps, 200);
    return {orbits.pass(), head + fmt::format("; synthesize {} rounds, support {}; {}", x.rounds.size(),
                                              x.support_width(), worst_clause(orbits))};
  } catch (const Error& e) {
    // Cells of parameter length tau/(C k M) reach t = 1 only after about
    // k0 e^{C M / tau} steps.
    const double tau = std::log1p(sp.eps / 4.0);
    return {false, head + fmt::format("; synthesize at eps = 0.1: {} error: {}; covering the curve needs "
                                      "log q >= C M / tau >= 4 / {:.4f} = {:.0f}",
                                      to_string(e.kind()), e.what(), tau, 4.0 / tau)};
  }
}

// ---------------------------------------------------------------- 5

Outcome diameter_bound() {
  const double step = 1e-5, delta = 0.25;
  PointCloud grid = line_grid(1.0, 2.0, step);
  const Interval dom{0.5, 2.5};
  struct Fam {
    std::string name;
    WeightFamily w;
    std::vector<Index> ns;
  };
  std::vector<Fam> fams{{"rolewicz", WeightFamily::rolewicz(dom), {10, 30, 100, 300, 1000, 3000, 10000}},
                        {"exp_power 1/2", WeightFamily::exp_power(0.5, dom), {10, 100, 1000, 10000, 100000, 1000000, 10000000}},
                        {"exp_power 1/3", WeightFamily::exp_power(1.0 / 3.0, dom), {100, 1000, 10000, 100000, 1000000, 10000000}}};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(1.2, 1.8);
  int instances = 0, violations = 0;
  double tightest = 0.0;
  for (const auto& f : fams)
    for (Index n : f.ns) {
      // u = e^{-f_n(a0)} e_n, so T_{a0}^n u = e_0 = v; a second entry far
      // out keeps u from being a pure basis vector.
      const double a0 = U(rng);
      LogTuple u(1), v(1);
      u[0].add(n, -f.w.f(a0, n), 1);
      u[0].add(3 * n, -f.w.f(a0, 3 * n) - 5.0, -1);
      v[0].add(0, 0.0, 1);
      DiameterResult r = admissible_diameter(f.w, u, v, n, delta, grid, step);
      ++instances;
      if (!r.pass() || r.hits < 2) ++violations;
      tightest = std::max(tightest, r.diameter / (r.bound + 2 * step));
    }
  return {violations == 0 && instances == 20,
          fmt::format("{} instances, {} violations, largest diameter/(bound + 2 step) {:.4f}", instances, violations, tightest)};
}

// ---------------------------------------------------------------- 6

Outcome gauge_classes() {
  int wrong = 0, cases = 0;
  for (double s : {0.5, 1.0, 1.5, 2.0, 3.0})
    for (double alpha : {1.0 / 3.0, 0.5, 1.0}) {
      auto r = gauge_series(GaugeFn::power(s), PowerRate{1.0, alpha}, 0.5, 1 << 16);
      // s > 1/alpha written without division: s alpha > 1 exactly for the
      // rational grid above.
      const bool conv = s * 6.0 * alpha > 6.0 + 1e-9;
      ++cases;
      if ((r.tail == SeriesClass::Convergent) != conv || r.tail == SeriesClass::Inconclusive) ++wrong;
    }
  auto r = gauge_series(GaugeFn::x_over_log2(), PowerRate{1.0, 1.0}, 0.5, 1 << 16);
  ++cases;
  if (r.tail != SeriesClass::Convergent) ++wrong;
  return {wrong == 0, fmt::format("{} of {} cases agree with the analytic answer", cases - wrong, cases)};
}

// ---------------------------------------------------------------- 7

Outcome orderings() {
  OrderingParams p;
  p.m = 5;
  p.alpha = 0.4;
  p.N = 10;
  OrderingExperiment first = ordering_cost(p, Ordering::First);
  OrderingExperiment third = ordering_cost(p, Ordering::Third);
  const double factor = static_cast<double>(first.n_final) / static_cast<double>(third.n_final);
  const bool ok = factor >= 10.0 && third.saut2 && !first.admissible && first.saut_violations == 0 &&
                  third.saut_violations == 0;
  return {ok, fmt::format("n_final first {} third {} (factor {:.1f}); third D* = {:.3f} <= {}: {}; first admissible: {}",
                          first.n_final, third.n_final, factor, third.D_star, p.D_ref, third.saut2, first.admissible)};
}

// ---------------------------------------------------------------- 8

Outcome comb() {
  int bad = 0;
  std::string counts;
  for (int m = 3; m <= 10; ++m) {
    CombCount c = comb_count(m);
    if (static_cast<double>(c.count) < c.lower) ++bad;
    counts += fmt::format("{}{}", m == 3 ? "" : ",", c.count);
  }
  BoxDimEstimate e = box_dim_estimate(ParamSet::comb(11), {4, 5, 6, 7, 8, 9, 10});
  return {bad == 0 && e.slope > 1.7,
          fmt::format("counts m=3..10: {}; {} below bound; slope m=4..10 {:.4f}", counts, bad, e.slope)};
}

// ---------------------------------------------------------------- 9

Outcome cantor() {
  ParamSet lambda = ParamSet::cantor(0.2, 2, {1.0, 1.0}, 1.0);
  CoverConstants cc = cover_constants(lambda);
  const double gamma = std::log(4.0) / std::log(5.0);
  if (std::fabs(cc.gamma - gamma) > 1e-12) return {false, fmt::format("gamma {} != log4/log5", cc.gamma)};
  CoveringParams p;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.delta = 0.1;
  p.N = 10;
  p.D = 1.0;
  p.tau = 256.0;
  try {
    CoveringSolution sol = solve_covering(lambda, p);
    std::size_t q = 0;
    for (const auto& s : sol.schedules) q += s.size();
    return {sol.verification.pass(), fmt::format("gamma {:.4f}; depth {} ({} pieces), m = {}, {} cells; {}", cc.gamma,
                                                 sol.presubdivision_depth, sol.pieces.size(), sol.trace.m, q,
                                                 worst_clause(sol.verification))};
  } catch (const Error& e) {
    return {false, fmt::format("solve_covering: {} error: {}", to_string(e.kind()), e.what())};
  }
}

// ---------------------------------------------------------------- 10

Outcome walpha_agreement() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double N = 5.0, tau = 1.0;
  int disagree = 0, passes = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t q = 2 + rng() % 49;
    Schedule s;
    s.d = 2;
    Index n = 10 + static_cast<Index>(rng() % 20);
    // Weighted gaps a_{k+1} n_{k+1} - a_k n_k land on either side of N.
    const double bias = U(rng) < 0.5 ? 1.0 : 0.0;
    std::vector<double> a{1.0 + U(rng), 1.0 + U(rng)};
    for (std::size_t k = 0; k < q; ++k) {
      ScheduleEntry e;
      e.n = n;
      e.anchor = a;
      s.entries.push_back(e);
      Cell c;
      c.box = Box{a, a};
      s.cells.push_back(c);
      const Index next = n + static_cast<Index>(N) + static_cast<Index>(rng() % 10);
      for (auto& x : a) {
        const double target = x * static_cast<double>(n) + N * (bias + (U(rng) - 0.1) * 3.0);
        x = std::max(0.05, target / static_cast<double>(next));
      }
      n = next;
    }
    ParamSet K = ParamSet::cube({s.entries[0].anchor[0] - 0.5 * tau / s.entries[0].n,
                                 s.entries[0].anchor[1] - 0.5 * tau / s.entries[0].n},
                                0.0);
    const bool w = check_walpha(s, 1.0, N).pass();
    const bool c = check_caracstandard(s, K, tau, N).pass();
    if (w != c) ++disagree;
    passes += c ? 1 : 0;
  }
  return {disagree == 0, fmt::format("{} disagreements over 100 schedules ({} pass both)", disagree, passes)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 = no runtime bound stated
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

  const std::vector<Criterion> all{
      {1, "inverse identity", 1.0, inverse_identity},
      {2, "sequence growth bound", 5.0, sequence_bound},
      {3, "covering of [1,2]^2", 30.0, covering_cube},
      {4, "curve pipeline, Rolewicz d=2", 60.0, curve_pipeline},
      {5, "separation diameter bound", 30.0, diameter_bound},
      {6, "gauge classification", 0.0, gauge_classes},
      {7, "ordering experiment", 10.0, orderings},
      {8, "comb box counts", 0.0, comb},
      {9, "Cantor covering", 0.0, cantor},
      {10, "walpha vs caracstandard", 0.0, walpha_agreement},
  };
  bool all_pass = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, fmt::format("{} error: {}", to_string(e.kind()), e.what())};
    }
    const double dt = seconds_since(t0);
    if (c.budget_s > 0.0 && dt > c.budget_s) {
      o.pass = false;
      o.detail += fmt::format("; runtime {:.2f} s exceeds {} s", dt, c.budget_s);
    }
    fmt::print("criterion {:>2} {}: {} [{:.2f} s] {}\n", c.id, o.pass ? "PASS" : "FAIL", c.name, dt, o.detail);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
