#include "hclab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "hclab/errors.hpp"
#include "hclab/parallel.hpp"

namespace hclab {

namespace {

constexpr long double kIndexMax = 9.2e18L;
// Relative slack allowed when a sampled quantity equals its bound up to
// floating-point rounding of the breakpoints.
constexpr double kRelTol = 1e-9;

std::string digits_str(const std::vector<int>& dg) {
  std::string s = "(";
  for (std::size_t i = 0; i < dg.size(); ++i) s += (i ? "," : "") + std::to_string(dg[i]);
  return s + ")";
}

std::vector<int> digits_of(std::int64_t t, int r, int m) {
  std::vector<int> dg(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    dg[i] = static_cast<int>(t % r) + 1;
    t /= r;
  }
  return dg;
}

double inv_pow(double x, double beta) { return beta == 1.0 ? 1.0 / x : std::pow(x, -beta); }

// Upper bound on sum_{l=1}^{L} l^{-beta}; exact below 10^6 terms.
long double harmonic_upper(long double L, double beta) {
  constexpr long double kExact = 1e6L;
  const long double K = std::min(L, kExact);
  long double s = 0.0L;
  for (long double l = std::floor(K); l >= 1.0L; l -= 1.0L) s += std::pow(l, -static_cast<long double>(beta));
  if (L > K) {
    if (beta == 1.0) s += std::log(L / K);
    else s += (std::pow(L, 1.0L - beta) - std::pow(K, 1.0L - beta)) / (1.0L - beta);
  }
  return s;
}

}  // namespace

void RecursionParams::validate() const {
  if (!(alpha > 0.0)) fail(ErrorKind::Invalid, "alpha must be positive");
  if (!(rho > 0.0 && rho < 1.0)) fail(ErrorKind::Invalid, "rho must lie in (0,1)");
  if (r < 2) fail(ErrorKind::Invalid, "r must be >= 2");
  if (m < 1 || m > 62) fail(ErrorKind::Invalid, "m must lie in 1..62");
  if (n1 < 1) fail(ErrorKind::Invalid, "n1 must be >= 1");
  if (A < 1) fail(ErrorKind::Invalid, "A must be a positive integer");
  if (std::pow(rho, 1.0 / alpha) * r >= 1.0)
    fail(ErrorKind::Divergence, fmt::format("rho^(1/alpha) r = {} is not below 1", std::pow(rho, 1.0 / alpha) * r));
}

std::vector<Index> build_sequence(const RecursionParams& p) {
  p.validate();
  long double q = 1.0L;
  for (int i = 0; i < p.m; ++i) q *= p.r;
  if (q > static_cast<long double>(1 << 28))
    fail(ErrorKind::Capacity, fmt::format("r^m = {} entries exceed the sequence cap", static_cast<double>(q)));
  const auto Q = static_cast<std::int64_t>(q);
  std::vector<long double> factor(static_cast<std::size_t>(p.m) + 1);
  for (int k = 1; k <= p.m; ++k)
    factor[k] = 1.0L / (1.0L - std::pow(static_cast<long double>(p.rho), static_cast<long double>(k) / p.alpha));
  std::vector<Index> n(static_cast<std::size_t>(Q));
  n[0] = p.n1;
  for (std::int64_t t = 1; t < Q; ++t) {
    int trailing = 0;
    for (std::int64_t u = t; u % p.r == 0; u /= p.r) ++trailing;
    const int pos = p.m - trailing;
    long double v = std::floor(static_cast<long double>(n[t - 1]) * factor[pos]) + static_cast<long double>(p.A);
    if (v > kIndexMax)
      fail(ErrorKind::Capacity,
           fmt::format("sequence overflows 64 bits at index {}", digits_str(digits_of(t, p.r, p.m))));
    n[t] = static_cast<Index>(v);
  }
  return n;
}

RecursionConstants recursion_constants(double alpha, double rho, int r) {
  if (!(alpha > 0.0) || !(rho > 0.0 && rho < 1.0) || r < 2) fail(ErrorKind::Invalid, "bad recursion constants input");
  const long double x = std::pow(static_cast<long double>(rho), 1.0L / alpha);
  const long double rx = x * r;
  if (rx >= 1.0L) fail(ErrorKind::Divergence, fmt::format("rho^(1/alpha) r = {} is not below 1", static_cast<double>(rx)));
  const long double R = r;

  // log c1 = sum_j (r-1) r^{j-1} (-log(1-x^j)); the remaining terms after J
  // are below ((r-1)/r) (rx)^{J+1} / ((1-rx)(1-x^{J+1})).
  long double logc1 = 0.0L, K = 0.0L, tail = 0.0L;
  int J = 0;
  long double xj = 1.0L, rj = 1.0L / R;  // x^j, r^{j-1}
  for (J = 1; J < 100000; ++J) {
    xj *= x;
    rj *= R;
    logc1 += (R - 1.0L) * rj * -std::log1p(-xj);
    K += (R - 1.0L) * rj * xj / (1.0L - xj);
    const long double xn = xj * x;
    tail = ((R - 1.0L) / R) * std::pow(rx, static_cast<long double>(J + 1)) / ((1.0L - rx) * (1.0L - xn));
    if (tail < 1e-17L * std::max(logc1, 1e-300L)) break;
  }
  RecursionConstants rc;
  rc.terms = J;
  rc.c1_partial = static_cast<double>(std::exp(logc1));
  logc1 += tail;
  K += tail;  // the K-series has the same tail bound

  // C(m,B) <= exp(K B^{1/alpha}); unrolling D(m,1)/r^m with B = rho^i gives
  // D(m,1)/r^m <= P (q_1^{r-1} + 1/(r-1)) where
  // log P = sum_{i>=0} (r-1) [-log(1-x^{i+1}) + K x^{i+1}].
  long double logP = 0.0L, xi = 1.0L;
  for (int i = 0; i < 100000; ++i) {
    xi *= x;
    logP += (R - 1.0L) * (-std::log1p(-xi) + K * xi);
    const long double xn = xi * x;
    const long double t = (R - 1.0L) * (1.0L / (1.0L - xn) + K) * xn / (1.0L - x);
    if (t < 1e-17L * std::max(logP, 1e-300L)) {
      logP += t;
      break;
    }
  }
  const long double q1 = 1.0L / (1.0L - x);
  const long double c2 = std::exp(logP) * (std::pow(q1, R - 1.0L) + 1.0L / (R - 1.0L));
  rc.c1 = static_cast<double>(std::exp(logc1) * (1.0L + 1e-12L));
  rc.c2 = static_cast<double>(c2 * (1.0L + 1e-12L));
  return rc;
}

AuxConstants aux_constants(double alpha, double rho, int r, int m, double B) {
  if (m < 1) fail(ErrorKind::Invalid, "m must be >= 1");
  const long double x = std::pow(static_cast<long double>(rho), 1.0L / alpha);
  // Evaluate from the innermost level B rho^{m-1} outwards.
  auto qB = [&](long double b) { return 1.0L / (1.0L - std::pow(b, 1.0L / alpha) * x); };
  long double b = B * std::pow(static_cast<long double>(rho), static_cast<long double>(m - 1));
  AuxConstants a;
  a.C = std::pow(qB(b), static_cast<long double>(r - 1));
  a.D = r * a.C;
  for (int level = m - 1; level >= 1; --level) {
    b /= rho;
    const long double qr = std::pow(qB(b), static_cast<long double>(r - 1));
    const long double Cn = qr * std::pow(a.C, static_cast<long double>(r));
    const long double Dn = r * qr * std::pow(a.C, static_cast<long double>(r - 1)) * (1.0L + a.D);
    a.C = Cn;
    a.D = Dn;
  }
  return a;
}

std::vector<Index> Schedule::times() const {
  std::vector<Index> t;
  t.reserve(entries.size());
  for (const auto& e : entries) t.push_back(e.n);
  return t;
}

bool Schedule::checks_pass() const {
  for (const auto& c : checks)
    if (c.status == Status::Fail || c.status == Status::Indeterminate) return false;
  return true;
}

void attach_samples(Schedule& s, const ParamSet& K) {
  std::vector<Box> boxes;
  for (auto& c : s.cells) {
    boxes.push_back(c.box);
    c.samples = PointCloud(K.d);
  }
  BoxIndex index(std::move(boxes), sample_resolution(K));
  PointCloud P = sample_points(K);
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t k : index.query(P.at(i))) s.cells[k].samples.push(P.at(i));
}

double anchor_reach(const ProductParam& anchor, const Box& box) {
  double m = 0.0;
  for (std::size_t i = 0; i < anchor.size(); ++i) m = std::max({m, box.hi[i] - anchor[i], anchor[i] - box.lo[i]});
  return m;
}

std::vector<Clause> verify_covering(const Schedule& s, const ParamSet& piece) {
  const auto& c = s.constants;
  const std::size_t q = s.size();
  std::vector<Clause> out;

  {  // (a)
    double margin = static_cast<double>(s.entries[0].n) - c.N;
    std::string w = "k=1";
    for (std::size_t k = 1; k < q; ++k) {
      double g = static_cast<double>(s.entries[k].n - s.entries[k - 1].n) - c.N;
      if (g < margin) {
        margin = g;
        w = fmt::format("k={}", k + 1);
      }
    }
    out.push_back(weak_clause("a", margin, w));
  }
  {  // (b): radius on sample boxes, coverage of the sample cloud
    double margin = std::numeric_limits<double>::infinity();
    std::string w;
    std::vector<Box> boxes;
    for (std::size_t k = 0; k < q; ++k) {
      double g = c.tau / std::pow(static_cast<double>(s.entries[k].n), c.alpha) -
                 anchor_reach(s.entries[k].anchor, s.cells[k].box);
      if (g < margin) {
        margin = g;
        w = "cell " + digits_str(s.entries[k].digits);
      }
      boxes.push_back(s.cells[k].box);
    }
    BoxIndex index(std::move(boxes), sample_resolution(piece));
    PointCloud all = sample_points(piece);
    std::size_t uncovered = 0;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (!index.any(all.at(i))) ++uncovered;
    Clause cl = weak_clause("b", margin, w);
    if (uncovered > 0) {
      cl.status = Status::Fail;
      cl.witness = fmt::format("{} samples uncovered", uncovered);
    }
    out.push_back(cl);
  }
  {  // (c) and (d): quadratic sweeps, parallel over k with ordered reduction
    std::vector<double> cm(q, std::numeric_limits<double>::infinity()), dsum(q, 0.0);
    std::vector<std::size_t> cw(q, 0);
    parallel_for(q, [&](std::size_t k) {
      const double nk = static_cast<double>(s.entries[k].n);
      double best = std::numeric_limits<double>::infinity(), sum = 0.0;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < q; ++j) {
        if (j == k) continue;
        const double nj = static_cast<double>(s.entries[j].n);
        sum += inv_pow(std::fabs(nj - nk), c.beta);
        if (j > k) {
          double allow = c.D * std::pow((nj - nk) / nj, c.alpha);
          double g = allow - max_sup_dist(s.cells[k].box, s.cells[j].box);
          if (g < best) {
            best = g;
            arg = j;
          }
        }
      }
      cm[k] = best;
      cw[k] = arg;
      dsum[k] = sum;
    });
    double cmargin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    std::string cwit = "no pairs", dwit = "k=1";
    for (std::size_t k = 0; k < q; ++k) {
      if (cm[k] < cmargin) {
        cmargin = cm[k];
        cwit = fmt::format("k={} j={}", digits_str(s.entries[k].digits), digits_str(s.entries[cw[k]].digits));
      }
      if (dsum[k] > dmax) {
        dmax = dsum[k];
        dwit = "k=" + digits_str(s.entries[k].digits);
      }
    }
    if (q < 2) out.push_back({"c", Status::Pass, std::numeric_limits<double>::infinity(), "no pairs"});
    else out.push_back(weak_clause("c", cmargin, cwit));
    out.push_back(weak_clause("d", c.delta - dmax, dwit));
  }
  {  // (e)
    double sum = 0.0;
    for (const auto& e : s.entries) sum += inv_pow(static_cast<double>(e.n), c.beta);
    out.push_back(weak_clause("e", c.delta - sum, fmt::format("sum={:.17g}", sum)));
  }
  return out;
}

namespace {

struct PieceSolve {
  Schedule schedule;
  CoveringTrace trace;
};

PieceSolve solve_piece(const ParamSet& piece, const CoveringParams& p, const RecursionConstants& rc) {
  const CoverConstants cc = cover_constants(piece);
  const double rho = cc.rho();
  const int r = cc.r;
  const double C = cc.C_Lambda;
  PieceSolve out;
  CoveringTrace& tr = out.trace;
  tr.c1 = rc.c1;
  tr.c2 = rc.c2;
  tr.C_piece = C;
  Schedule& S = out.schedule;
  S.r = r;
  S.d = piece.d;
  S.constants = {p.tau, static_cast<double>(p.N), p.D, p.alpha, p.beta, p.delta};

  if (C == 0.0) {
    // A single point: one cell, n1 >= N with 1/n1^beta <= delta.
    Index n1 = std::max<Index>(p.N, static_cast<Index>(std::ceil(std::pow(1.0 / p.delta, 1.0 / p.beta))));
    CoverFamily cf = build_cover(piece, 0);
    S.m = 0;
    S.cells = cf.cells;
    S.entries.push_back({{}, n1, cf.cells[0].box.hi});
    tr.n1 = n1;
    return out;
  }

  const double logkappa = std::log(p.tau) / p.alpha - std::log(4.0 * rc.c1) - std::log(C) / p.alpha;
  tr.kappa = std::exp(logkappa);
  const double g = r * std::pow(rho, p.beta / p.alpha);
  auto s_ok = [&](int s) {
    return std::log(static_cast<double>(r)) - p.beta * logkappa + s * std::log(g) - std::log1p(-g) <
           std::log(p.delta / 3.0);
  };
  int s = 1;
  while (!s_ok(s)) {
    if (++s > 100000) fail(ErrorKind::Capacity, "no s satisfies r kappa^-beta sum_{p>=s} (r rho^{beta/alpha})^p < delta/3");
  }
  tr.s = s;

  const long double L = std::pow(static_cast<long double>(r), static_cast<long double>(s + 1));
  const long double H = harmonic_upper(L, p.beta);
  long double Aval = std::floor(std::pow(3.0L * H / p.delta, 1.0L / p.beta)) + 1.0L;
  auto a_ok = [&](long double a) { return H / std::pow(a, static_cast<long double>(p.beta)) < p.delta / 3.0L; };
  while (Aval > 1.0L && a_ok(Aval - 1.0L)) Aval -= 1.0L;
  while (!a_ok(Aval)) Aval += 1.0L;
  Aval = std::max(Aval, static_cast<long double>(p.N));
  if (Aval > 1e15L) fail(ErrorKind::Capacity, "A from sum_{l<=r^{s+1}} 1/(l A)^beta < delta/3 exceeds 1e15");
  const Index A = static_cast<Index>(Aval);
  tr.A = A;

  int m = 0;
  Index n1 = 0;
  std::string binding;
  for (int mm = 1; mm <= p.m_cap; ++mm) {
    const long double logn = -std::log(2.0L * rc.c1) +
                             (std::log(static_cast<long double>(p.tau)) - mm * std::log(static_cast<long double>(rho)) -
                              std::log(static_cast<long double>(C))) / p.alpha;
    const long double rm = std::pow(static_cast<long double>(r), static_cast<long double>(mm));
    const long double need_a = std::pow(3.0L / p.delta, 1.0L / p.beta);
    const long double need_b = 2.0L + (static_cast<long double>(rc.c2) / rc.c1) * A * rm;
    const long double need_c = static_cast<long double>(p.N);
    const long double need = std::max({need_a, need_b, need_c});
    binding = need == need_b ? "n1 >= 2 + (c2/c1) A r^m" : need == need_a ? "n1 >= (3/delta)^(1/beta)" : "n1 >= N";
    if (logn > std::log(kIndexMax) || need > kIndexMax) {
      fail(ErrorKind::Capacity,
           fmt::format("floor condition leaves 64-bit range at m={} before it holds (binding: {})", mm, binding));
    }
    const long double n1v = std::floor(std::exp(logn));
    if (n1v >= need) {
      m = mm;
      n1 = static_cast<Index>(n1v);
      break;
    }
  }
  if (m == 0)
    fail(ErrorKind::Capacity, fmt::format("no m <= {} satisfies the floor condition (binding: {})", p.m_cap, binding));
  tr.m = m;
  tr.n1 = n1;
  const long double q = std::pow(static_cast<long double>(r), static_cast<long double>(m));
  if (q > static_cast<long double>(p.max_cells))
    fail(ErrorKind::Capacity, fmt::format("q = r^m = {} cells exceeds the cap {} (m={}, n1={}, A={})",
                                          static_cast<double>(q), p.max_cells, m, n1, A));

  auto n = build_sequence({p.alpha, rho, r, m, n1, A});
  CoverFamily cf = build_cover(piece, m);
  S.m = m;
  for (std::size_t t = 0; t < cf.cells.size(); ++t) {
    Cell& cell = cf.cells[t];
    if (cell.empty()) continue;  // dropping a cell keeps (a)-(e) valid
    // Anchor: the sample nearest to the box centre.
    ProductParam best;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cell.samples.size(); ++i) {
      double dd = 0.0;
      for (int b = 0; b < piece.d; ++b)
        dd = std::max(dd, std::fabs(cell.samples.at(i)[b] - 0.5 * (cell.box.lo[b] + cell.box.hi[b])));
      if (dd < bd) {
        bd = dd;
        best = cell.samples.point(i);
      }
    }
    S.entries.push_back({cell.digits, n[t], best});
    S.cells.push_back(std::move(cell));
  }
  return out;
}

}  // namespace

namespace {

RecursionConstants checked_constants(const ParamSet& lambda, const CoveringParams& p, CoverConstants& cc) {
  lambda.validate();
  if (!(p.tau > 0.0 && p.delta > 0.0 && p.D > 0.0 && p.alpha > 0.0 && p.alpha <= 1.0 && p.beta > 0.0) || p.N < 1)
    fail(ErrorKind::Invalid, "covering needs tau, delta, D, beta > 0, alpha in (0,1] and N >= 1");
  cc = cover_constants(lambda);
  const double rho = cc.rho();
  if (cc.r * std::pow(rho, 1.0 / p.alpha) >= 1.0)
    fail(ErrorKind::Divergence, fmt::format("alpha gamma < 1 fails: rho^(1/alpha) r = {}", cc.r * std::pow(rho, 1.0 / p.alpha)));
  if (cc.r * std::pow(rho, p.beta / p.alpha) >= 1.0)
    fail(ErrorKind::Divergence,
         fmt::format("alpha gamma < beta fails: r rho^(beta/alpha) = {}", cc.r * std::pow(rho, p.beta / p.alpha)));
  return recursion_constants(p.alpha, rho, cc.r);
}

}  // namespace

std::vector<ParamSet> covering_pieces(const ParamSet& lambda, const CoveringParams& p, int* depth) {
  CoverConstants cc;
  const RecursionConstants rc = checked_constants(lambda, p, cc);
  const double target = p.D / (std::pow(2.0 * rc.c1, p.alpha) * std::pow(static_cast<double>(cc.r), 1.0 / cc.gamma));
  if (depth) *depth = 0;
  if (cc.C_Lambda <= target * (1.0 + 1e-12)) return {lambda};
  if (!p.allow_presubdivision)
    fail(ErrorKind::Capacity, fmt::format("C(Lambda) = {} exceeds D/((2c1)^alpha r^(1/gamma)) = {}", cc.C_Lambda, target));
  Presubdivision pre = presubdivide(lambda, target);
  if (depth) *depth = pre.depth;
  return std::move(pre.pieces);
}

CoveringSolution solve_covering(const ParamSet& lambda, const CoveringParams& p) {
  CoverConstants cc;
  const RecursionConstants rc = checked_constants(lambda, p, cc);
  CoveringSolution sol;
  sol.pieces = covering_pieces(lambda, p, &sol.presubdivision_depth);

  const std::size_t share = std::max<std::size_t>(64, p.verify_budget / sol.pieces.size());
  for (auto& piece : sol.pieces) piece.sample_budget = share;
  sol.schedules.resize(sol.pieces.size());
  std::vector<std::vector<Clause>> checks(sol.pieces.size());
  for (std::size_t i = 0; i < sol.pieces.size(); ++i) {
    PieceSolve ps = solve_piece(sol.pieces[i], p, rc);
    if (i == 0) sol.trace = ps.trace;
    ps.schedule.checks = verify_covering(ps.schedule, sol.pieces[i]);
    sol.schedules[i] = std::move(ps.schedule);
  }

  sol.verification.criterion = "covering";
  for (const char* id : {"a", "b", "c", "d", "e"}) {
    Clause worst{id, Status::Pass, std::numeric_limits<double>::infinity(), ""};
    for (std::size_t i = 0; i < sol.schedules.size(); ++i)
      for (const auto& c : sol.schedules[i].checks) {
        if (c.id != id) continue;
        bool worse = (c.status == Status::Fail && worst.status != Status::Fail) ||
                     ((c.status == Status::Fail) == (worst.status == Status::Fail) && c.margin < worst.margin);
        if (worse) {
          worst = c;
          worst.witness = fmt::format("piece {}: {}", i, c.witness);
        }
      }
    sol.verification.add(worst);
  }
  return sol;
}

Schedule lipschitz_schedule(const ParamSet& curve, const LipschitzScheduleParams& p) {
  curve.validate();
  if (curve.kind != SetKind::LipschitzCurve) fail(ErrorKind::Invalid, "lipschitz_schedule needs a Lipschitz curve");
  if (!(p.tau > 0.0) || p.N < 1 || p.M < p.N) fail(ErrorKind::Invalid, "lipschitz_schedule needs tau > 0 and M >= N >= 1");
  if (p.k0 < 1) fail(ErrorKind::Invalid, "first index k0 must be >= 1");
  const long double C = curve.C;
  std::vector<long double> t{0.0L};
  for (Index k = p.k0;; ++k) {
    long double next = t.back() + static_cast<long double>(p.tau) / (C * static_cast<long double>(k) * p.M);
    if (next > 1.0L) break;
    if (t.size() >= p.q_cap)
      fail(ErrorKind::Capacity, fmt::format("q exceeds the cap {}: tau = {} is too small against C M = {}", p.q_cap,
                                            p.tau, static_cast<double>(C) * p.M));
    t.push_back(next);
  }
  const std::size_t q = t.size();
  Schedule S;
  S.r = 0;
  S.m = 1;
  S.d = curve.d;
  S.constants = {p.tau, static_cast<double>(p.N), 0.0, 1.0, 1.0, 0.0};
  S.entries.resize(q);
  S.cells.resize(q);
  parallel_for(q, [&](std::size_t k) {
    const double a = static_cast<double>(t[k]), b = k + 1 < q ? static_cast<double>(t[k + 1]) : 1.0;
    Cell& c = S.cells[k];
    c.digits = {static_cast<int>(p.k0 + static_cast<Index>(k))};
    c.samples = sample_curve(curve.curve, a, b, p.interior_samples);
    c.box = Box::of(c.samples);
    c.anchor = c.box.hi;
    c.diam_bound = curve.C * (b - a);
    S.entries[k] = {c.digits, (p.k0 + static_cast<Index>(k)) * p.M, c.anchor};
  });

  // Lambda_k inside prod_i [lambda_k(i) - tau/n_k, lambda_k(i)] and
  // |lambda_{k+1}(i) - lambda_k(i)| <= 2 tau/(kM), relative margins.
  double box_margin = std::numeric_limits<double>::infinity(), step_margin = box_margin;
  std::string bw, sw;
  for (std::size_t k = 0; k < q; ++k) {
    const double allow = p.tau / static_cast<double>(S.entries[k].n);
    for (int i = 0; i < curve.d; ++i) {
      double g = (allow - (S.entries[k].anchor[i] - S.cells[k].box.lo[i])) / allow;
      if (g < box_margin) {
        box_margin = g;
        bw = fmt::format("k={} i={}", k + 1, i);
      }
      if (k + 1 < q) {
        const double sallow = 2.0 * p.tau / (static_cast<double>(p.k0 + static_cast<Index>(k)) * p.M);
        double sg = (sallow - std::fabs(S.entries[k + 1].anchor[i] - S.entries[k].anchor[i])) / sallow;
        if (sg < step_margin) {
          step_margin = sg;
          sw = fmt::format("k={} i={}", k + 1, i);
        }
      }
    }
  }
  Clause cb{"cell_box", box_margin >= -kRelTol ? Status::Pass : Status::Fail, box_margin, bw};
  Clause cs{"anchor_step", step_margin >= -kRelTol ? Status::Pass : Status::Fail, step_margin, sw};
  if (q < 2) cs = {"anchor_step", Status::NotApplicable, 0.0, "q=1"};
  S.checks = {cb, cs};
  return S;
}

}  // namespace hclab
