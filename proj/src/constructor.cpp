#include "hclab/constructor.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "hclab/errors.hpp"
#include "hclab/parallel.hpp"

namespace hclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_zero(const LogTuple& v) {
  for (const auto& c : v)
    if (!c.empty()) return false;
  return true;
}

LogTuple negate(const LogTuple& v) {
  LogTuple r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (const auto& e : v[i].entries()) r[i].add(e.index, e.logmag, -e.sign);
  return r;
}

// ||v|| e^{-g} / (1 - e^{-p g})^{1/p}: geometric tail of blocks decaying by
// e^{-g} per step, as for Rolewicz weights.
double geometric_tail(double vnorm, double g, const NormTag& norm) {
  if (g <= 0.0) return kInf;
  if (norm.kind == NormTag::Kind::Sup) return vnorm * std::exp(-g);
  return vnorm * std::exp(-g) / std::pow(-std::expm1(-norm.p * g), 1.0 / norm.p);
}

struct LipschitzChoice {
  double tau;
  Index M;
};

LipschitzChoice choose_lipschitz(const WeightFamily& w, const ParamSet& lambda, const LogTuple& v, Index N,
                                 const SynthesisParams& p) {
  auto model = w.lipschitz_model();
  if (!model || model->scale != LipschitzModel::Scale::Power || model->alpha != 1.0)
    fail(ErrorKind::Synthesis, "the Lipschitz schedule source needs weights with f_n Lipschitz in a at scale n");
  const NormTag& norm = p.basic.norm;
  const double vnorm = tuple_norm(v, norm);
  double tau = p.tau;
  if (tau <= 0.0) {
    // BC5: the diagonal term deviates by at most (e^{c tau} - 1)||v|| within a cell.
    const double share = p.eps / (4.0 * vnorm);
    tau = share >= 1.0 ? 1.0 : std::log1p(share) / model->c_upper;
  }
  PointCloud P = sample_points(lambda);
  double lo = kInf;
  for (double c : P.xs) lo = std::min(lo, c);
  if (!(lo > 0.0)) fail(ErrorKind::Synthesis, "the Lipschitz schedule source needs positive parameters");
  Index M = p.M;
  if (M <= 0) {
    M = N;
    // Gaps lambda_{k+1} n_{k+1} - lambda_k n_k >= lo M - 4 tau drive BC2 and BC3.
    auto ok = [&](Index m) {
      const double g = lo * static_cast<double>(m) - 4.0 * tau;
      return g >= static_cast<double>(N) && geometric_tail(vnorm, g, norm) < p.eps / 4.0 &&
             geometric_tail(vnorm, lo * static_cast<double>(m), norm) < p.eps / 4.0;
    };
    while (!ok(M)) {
      if (++M > (Index{1} << 40)) fail(ErrorKind::Synthesis, "no block spacing M meets the BC2/BC3 budget");
    }
  }
  return {tau, std::max(M, N)};
}

std::string rounds_label(std::size_t t, std::size_t pc) { return fmt::format("target {} piece {}", t, pc); }

double achieved(const CriterionReport& r, double eps) {
  double worst = 0.0;
  for (const auto& c : r.clauses)
    if (c.id != "BC1" && c.status != Status::NotApplicable) worst = std::max(worst, eps - c.margin);
  return worst;
}

std::string first_failure(const CriterionReport& r) {
  for (const auto& c : r.clauses)
    if (c.status == Status::Fail || c.status == Status::Indeterminate)
      return fmt::format("{} ({}, margin {:.6g}, {})", c.id, to_string(c.status), c.margin, c.witness);
  return "none";
}

}  // namespace

const char* to_string(ScheduleSource s) { return s == ScheduleSource::Covering ? "covering" : "lipschitz"; }

ScheduleSource parse_schedule_source(const std::string& s) {
  if (s == "covering") return ScheduleSource::Covering;
  if (s == "lipschitz") return ScheduleSource::Lipschitz;
  fail(ErrorKind::Invalid, "unknown schedule source '" + s + "'");
}

CandidateVector synthesize(const WeightFamily& w, const LogTuple& u, const std::vector<LogTuple>& targets,
                           const ParamSet& lambda, const SynthesisParams& p) {
  lambda.validate();
  if (!(p.eps > 0.0)) fail(ErrorKind::Invalid, "eps must be positive");
  if (p.N_base < 1) fail(ErrorKind::Invalid, "N_base must be >= 1");
  const int d = lambda.d;
  CandidateVector cv;
  cv.d = d;
  cv.norm = p.basic.norm;
  cv.u = u.empty() ? LogTuple(static_cast<std::size_t>(d)) : u;
  if (static_cast<int>(cv.u.size()) != d) fail(ErrorKind::Invalid, "u must be a d-tuple");
  cv.x = cv.u;

  std::vector<ParamSet> pieces{lambda};
  if (p.source == ScheduleSource::Covering) pieces = covering_pieces(lambda, p.covering);

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const LogTuple& v = targets[t];
    if (static_cast<int>(v.size()) != d) fail(ErrorKind::Invalid, fmt::format("target {} is not a d-tuple", t));
    if (is_zero(v)) continue;
    const Index W = tuple_support_width(v);
    for (std::size_t pc = 0; pc < pieces.size(); ++pc) {
      // New blocks start beyond twice the current support.
      const Index L = cv.support_width();
      Index N = std::max({p.N_base, W, 2 * L});
      Round round;
      round.target = t;
      round.piece = pc;
      bool done = false;
      for (int attempt = 0; attempt <= p.escalations && !done; ++attempt, N *= 2) {
        Schedule s;
        if (p.source == ScheduleSource::Lipschitz) {
          // Clearance past 2L goes into the first index k0, not the spacing M:
          // q grows like k0 e^{C M / tau}.
          const Index spacing = std::max(p.N_base, W) << attempt;
          auto ch = choose_lipschitz(w, pieces[pc], v, spacing, p);
          LipschitzScheduleParams lp;
          lp.tau = ch.tau;
          lp.N = spacing;
          lp.M = ch.M;
          lp.k0 = std::max<Index>(1, (N + ch.M - 1) / ch.M);
          lp.q_cap = p.q_cap;
          s = lipschitz_schedule(pieces[pc], lp);
        } else {
          CoveringParams cp = p.covering;
          cp.N = N;
          cp.allow_presubdivision = false;
          CoveringSolution sol = solve_covering(pieces[pc], cp);
          s = std::move(sol.schedules.front());
        }
        const Index top = s.entries.back().n + W;
        if (top > p.truncation_cap)
          fail(ErrorKind::Capacity, fmt::format("round {} needs {} coefficients, cap is {}", rounds_label(t, pc), top,
                                                p.truncation_cap));
        CriterionReport rep = check_basic_criterion(s, w, cv.x, v, p.eps, pieces[pc], p.basic);
        round.N = N;
        round.escalations = attempt;
        round.schedule = std::move(s);
        round.report = std::move(rep);
        done = round.report.pass();
      }
      if (!done)
        fail(ErrorKind::Synthesis, fmt::format("round {} fails after {} escalations: {}", rounds_label(t, pc),
                                               p.escalations, first_failure(round.report)));
      round.achieved_eps = achieved(round.report, p.eps);
      for (const auto& e : round.schedule.entries) {
        LogTuple b = tuple_forward(w, e.anchor, v, e.n);
        for (int i = 0; i < d; ++i) cv.x[i].add(b[i]);
      }
      cv.rounds.push_back(std::move(round));
    }
  }
  return cv;
}

CriterionReport verify_orbits(const CandidateVector& x, const WeightFamily& w, const ParamSet& lambda,
                              const std::vector<LogTuple>& targets, double eps, std::size_t lambda_count) {
  CriterionReport rep;
  rep.criterion = "orbits";
  const int d = x.d;
  ParamSet grid = lambda;
  grid.sample_budget = std::max<std::size_t>(2, lambda_count);
  PointCloud P = sample_points(grid);

  std::vector<BoxIndex> indices;
  for (const auto& r : x.rounds) {
    std::vector<Box> boxes;
    for (const auto& c : r.schedule.cells) boxes.push_back(c.box);
    indices.emplace_back(std::move(boxes), kBoxTol);
  }

  const std::size_t T = targets.size();
  std::vector<double> best(P.size() * T, kInf);
  std::vector<char> covered(P.size(), 0);
  parallel_for(P.size(), [&](std::size_t i) {
    ProductParam lam = P.point(i);
    for (std::size_t ri = 0; ri < x.rounds.size(); ++ri) {
      const Round& r = x.rounds[ri];
      for (std::size_t k : indices[ri].query(P.at(i))) {
        covered[i] = 1;
        double dist = tuple_dist(tuple_backward(w, lam, x.x, r.schedule.entries[k].n), targets[r.target], x.norm);
        double& b = best[i * T + r.target];
        b = std::min(b, dist);
      }
    }
  });

  std::size_t uncovered = 0, first = 0;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (!covered[i] && uncovered++ == 0) first = i;
  if (uncovered)
    rep.add({"BC1", Status::Fail, -1.0, fmt::format("{} of {} samples outside every cell, first #{}", uncovered, P.size(), first)});
  else
    rep.add({"BC1", Status::Pass, 0.0, fmt::format("{} samples", P.size())});

  double worst = -kInf;
  std::string wit = "no targets";
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t t = 0; t < T; ++t) {
      double b = best[i * T + t];
      // A zero target has no round: T^n x = 0 once n passes the support.
      if (is_zero(targets[t])) b = 0.0;
      if (!(b <= worst)) {
        worst = b;
        std::string pt = "(";
        for (int c = 0; c < d; ++c) pt += fmt::format("{}{:.9g}", c ? "," : "", P.at(i)[c]);
        wit = fmt::format("lambda={}) target={}", pt, t);
      }
    }
  if (worst == -kInf) rep.add({"orbits", Status::Pass, eps, wit});
  else if (worst == kInf) rep.add({"orbits", Status::Fail, -kInf, wit + " has no round"});
  else rep.add(strict_clause("orbits", eps - worst, wit));

  // ||T^n x - v|| <= ||T^n u|| + ||T^n (x - u - B_k)|| + ||T^n B_k - v|| at anchors.
  double ledger = kInf;
  std::string lw = "no rounds";
  for (std::size_t ri = 0; ri < x.rounds.size(); ++ri) {
    const Round& r = x.rounds[ri];
    const LogTuple& v = targets[r.target];
    const std::size_t q = r.schedule.size();
    std::vector<double> slack(q, kInf);
    parallel_for(q, [&](std::size_t k) {
      const auto& e = r.schedule.entries[k];
      LogTuple Bk = tuple_forward(w, e.anchor, v, e.n);
      double whole = tuple_dist(tuple_backward(w, e.anchor, x.x, e.n), v, x.norm);
      double pu = tuple_norm(tuple_backward(w, e.anchor, x.u, e.n), x.norm);
      LogTuple rest = tuple_sum(tuple_sum(x.x, negate(x.u)), negate(Bk));
      double pr = tuple_norm(tuple_backward(w, e.anchor, rest, e.n), x.norm);
      double pd = tuple_dist(tuple_backward(w, e.anchor, Bk, e.n), v, x.norm);
      double parts = pu + pr + pd;
      slack[k] = parts * (1.0 + 1e-9) - whole;
    });
    for (std::size_t k = 0; k < q; ++k)
      if (slack[k] < ledger) {
        ledger = slack[k];
        lw = fmt::format("round {} k={}", ri, k + 1);
      }
  }
  if (x.rounds.empty()) rep.add({"ledger", Status::NotApplicable, 0.0, lw});
  else rep.add(weak_clause("ledger", ledger, lw));
  return rep;
}

}  // namespace hclab
