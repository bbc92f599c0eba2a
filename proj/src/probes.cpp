#include "hclab/probes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "hclab/errors.hpp"
#include "hclab/parallel.hpp"

namespace hclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExpTol = 1e-12;  // exponents this close to 1 count as 1

LipschitzModel require_model(const WeightFamily& w) {
  auto m = w.lipschitz_model();
  if (!m || !(m->c_lower > 0.0))
    fail(ErrorKind::Invalid, fmt::format("weight family {} has no lower Lipschitz bound", to_string(w.kind())));
  return *m;
}

SeriesClass classify(double p, double q) {
  if (p > 1.0 + kExpTol) return SeriesClass::Convergent;
  if (p < 1.0 - kExpTol) return SeriesClass::Divergent;
  return q > 1.0 + kExpTol ? SeriesClass::Convergent : SeriesClass::Divergent;
}

// Partial sum over n in the gauge's monotone range, plus the fitted
// exponent between n_max/2 and n_max.
GaugeSeriesResult sum_terms(const GaugeFn& phi, const std::function<double(Index)>& psi, double delta,
                            Index n_max) {
  if (n_max < 2) fail(ErrorKind::Invalid, "n_max must be >= 2");
  if (!(delta > 0.0)) fail(ErrorKind::Invalid, "delta must be positive");
  GaugeSeriesResult res;
  res.n_max = n_max;
  const double lim = phi.monotone_limit();
  long double sum = 0.0L;
  for (Index n = 1; n <= n_max; ++n) {
    const double x = 2.0 * delta / psi(n);
    if (!(x > 0.0) || x >= lim) continue;
    if (res.first_in_range == 0) res.first_in_range = n;
    sum += phi(x);
  }
  res.partial_sum = static_cast<double>(sum);
  const Index h = n_max / 2;
  const double t1 = phi(2.0 * delta / psi(h)), t2 = phi(2.0 * delta / psi(n_max));
  res.observed_p = -(std::log(t2) - std::log(t1)) / std::log(static_cast<double>(n_max) / static_cast<double>(h));
  return res;
}

unsigned gray(unsigned x) { return x ^ (x >> 1); }

// Sorted distinct values and the position of each input value.
struct Levels {
  std::vector<double> values;
  std::vector<std::uint32_t> of;
};

Levels levels(const std::vector<double>& xs) {
  Levels L;
  L.values = xs;
  std::sort(L.values.begin(), L.values.end());
  L.values.erase(std::unique(L.values.begin(), L.values.end()), L.values.end());
  L.of.reserve(xs.size());
  for (double x : xs)
    L.of.push_back(static_cast<std::uint32_t>(std::lower_bound(L.values.begin(), L.values.end(), x) - L.values.begin()));
  return L;
}

// 1 - ((a_k - a_j)/a_k)^{1/alpha}, the factor n_j must clear n_k by.
long double saut_keep(long double a_k, long double a_j, double alpha) {
  return 1.0L - std::pow((a_k - a_j) / a_k, 1.0L / static_cast<long double>(alpha));
}

}  // namespace

double separation_rate(const WeightFamily& w, Index n) {
  LipschitzModel m = require_model(w);
  return 0.5 * m.c_lower * m.F(n);
}

SeparationResult separation_bound(const WeightFamily& w, const ProductParam& lambda, const ProductParam& mu,
                                  Index n, const LogTuple& u, const LogTuple& v, double delta,
                                  const NormTag& norm) {
  if (lambda.size() != mu.size() || lambda.size() != u.size() || u.size() != v.size())
    fail(ErrorKind::Invalid, "parameters and tuples must share the dimension d");
  if (n < 1) fail(ErrorKind::Invalid, "n must be >= 1");
  SeparationResult r;
  LogTuple tl = tuple_backward(w, lambda, u, n);
  LogTuple tm = tuple_backward(w, mu, u, n);
  r.dist_lambda = tuple_dist(tl, v, norm);
  r.dist_mu = tuple_dist(tm, v, norm);
  r.lhs = tuple_dist(tl, tm, norm);
  r.rhs = separation_rate(w, n) * sup_dist(lambda, mu);
  if (!(r.dist_lambda < delta && r.dist_mu < delta)) {
    r.status = Status::NotApplicable;
  } else if (!std::isfinite(r.lhs)) {
    r.status = Status::Indeterminate;
  } else {
    r.status = r.lhs >= r.rhs ? Status::Pass : Status::Fail;
  }
  return r;
}

DiameterResult admissible_diameter(const WeightFamily& w, const LogTuple& u, const LogTuple& v, Index n,
                                   double delta, const PointCloud& grid, double grid_step, const NormTag& norm) {
  if (static_cast<std::size_t>(grid.d) != u.size() || u.size() != v.size())
    fail(ErrorKind::Invalid, "grid and tuples must share the dimension d");
  DiameterResult r;
  r.grid_step = grid_step;
  r.bound = 2.0 * delta / separation_rate(w, n);
  std::vector<char> hit(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t i) {
    hit[i] = tuple_dist(tuple_backward(w, grid.point(i), u, n), v, norm) < delta;
  });
  // Sup-norm diameter is the widest coordinate range of the hits.
  std::vector<double> lo(grid.d, kInf), hi(grid.d, -kInf);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!hit[i]) continue;
    ++r.hits;
    for (int b = 0; b < grid.d; ++b) {
      lo[b] = std::min(lo[b], grid.at(i)[b]);
      hi[b] = std::max(hi[b], grid.at(i)[b]);
    }
  }
  if (r.hits > 1)
    for (int b = 0; b < grid.d; ++b) r.diameter = std::max(r.diameter, hi[b] - lo[b]);
  return r;
}

PointCloud line_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) fail(ErrorKind::Invalid, "line grid needs lo <= hi and a positive step");
  PointCloud pc(1);
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  pc.xs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pc.xs.push_back(lo + static_cast<double>(i) * step);
  return pc;
}

double GaugeFn::operator()(double x) const {
  if (kind == Kind::Power) return std::pow(x, s);
  const double l = std::log(x);
  return x / (l * l);
}

double GaugeFn::monotone_limit() const {
  // x / log^2 x has derivative (log x - 2) / log^3 x > 0 on (0, 1).
  return kind == Kind::Power ? kInf : 1.0;
}

std::string to_string(const GaugeFn& g) {
  return g.kind == GaugeFn::Kind::Power ? fmt::format("power:{}", g.s) : "x_over_log2";
}

GaugeFn parse_gauge(const std::string& s) {
  if (s == "x_over_log2") return GaugeFn::x_over_log2();
  if (s.rfind("power:", 0) == 0) {
    std::size_t used = 0;
    double e = 0.0;
    try {
      e = std::stod(s.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() - 6 && e > 0.0) return GaugeFn::power(e);
  }
  fail(ErrorKind::Invalid, "unknown gauge '" + s + "'");
}

const char* to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::Convergent: return "convergent";
    case SeriesClass::Divergent: return "divergent";
    case SeriesClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

GaugeSeriesResult gauge_series(const GaugeFn& phi, const PowerRate& psi, double delta, Index n_max) {
  if (!(psi.C > 0.0) || !(psi.alpha > 0.0)) fail(ErrorKind::Invalid, "psi needs C > 0 and alpha > 0");
  GaugeSeriesResult res = sum_terms(phi, [&](Index n) { return psi(n); }, delta, n_max);
  // phi(2 delta / (C n^alpha)): x^s gives n^{-alpha s}; x / log^2 x gives
  // n^{-alpha} / (alpha^2 log^2 n) asymptotically.
  if (phi.kind == GaugeFn::Kind::Power) {
    res.p = psi.alpha * phi.s;
    res.q = 0.0;
  } else {
    res.p = psi.alpha;
    res.q = 2.0;
  }
  res.tail = classify(res.p, res.q);
  return res;
}

GaugeSeriesResult gauge_series(const GaugeFn& phi, const std::function<double(Index)>& psi, double delta,
                               Index n_max) {
  GaugeSeriesResult res = sum_terms(phi, psi, delta, n_max);
  res.p = res.observed_p;
  res.tail = SeriesClass::Inconclusive;
  return res;
}

Index saut_bound(double a_k, double a_j, double alpha, Index n_k) {
  if (!(alpha > 0.0) || !(a_k > 0.0) || n_k < 0) fail(ErrorKind::Invalid, "saut_bound needs alpha, a_k > 0 and n_k >= 0");
  if (a_j >= a_k) return n_k;
  if (!(a_j > 0.0)) fail(ErrorKind::Invalid, fmt::format("jump {} >= a_k = {} is infeasible", a_k - a_j, a_k));
  const long double keep = saut_keep(a_k, a_j, alpha);
  if (!(keep > 0.0L)) fail(ErrorKind::Invalid, "saut factor denominator is not positive");
  const long double want = static_cast<long double>(n_k) / keep;
  if (want > 9.2e18L) fail(ErrorKind::Capacity, "saut bound overflows 64 bits");
  auto c = static_cast<Index>(std::ceil(want));
  while (c > n_k && static_cast<long double>(c - 1) * keep >= static_cast<long double>(n_k)) --c;
  while (static_cast<long double>(c) * keep < static_cast<long double>(n_k)) ++c;
  return c;
}

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::First: return "first";
    case Ordering::Second: return "second";
    case Ordering::Third: return "third";
  }
  return "?";
}

Ordering parse_ordering(const std::string& s) {
  if (s == "first") return Ordering::First;
  if (s == "second") return Ordering::Second;
  if (s == "third") return Ordering::Third;
  fail(ErrorKind::Invalid, "unknown ordering '" + s + "'");
}

std::vector<Box> ordered_cells(int m, Ordering o) {
  if (m < 0 || m > 12) fail(ErrorKind::Invalid, "ordering depth must be in 0..12");
  const std::int64_t side = std::int64_t{1} << m;
  const double w = std::ldexp(1.0, -m);
  std::vector<Box> cells;
  cells.reserve(static_cast<std::size_t>(side * side));
  auto push = [&](std::int64_t i, std::int64_t j) {
    const double a = 1.0 + static_cast<double>(i) * w, b = 1.0 + static_cast<double>(j) * w;
    cells.push_back(Box{{a, b}, {a + w, b + w}});
  };
  for (std::int64_t t = 0; t < side * side; ++t) {
    if (o == Ordering::Third) {
      std::int64_t i = 0, j = 0;
      for (int p = m - 1; p >= 0; --p) {
        unsigned g = gray(static_cast<unsigned>((t >> (2 * p)) & 3));
        i = 2 * i + (g & 1u);
        j = 2 * j + ((g >> 1) & 1u);
      }
      push(i, j);
    } else {
      const std::int64_t row = t / side, col = t % side;
      const bool reverse = o == Ordering::Second && (row % 2 == 1);
      push(reverse ? side - 1 - col : col, row);
    }
  }
  return cells;
}

std::size_t saut_violations(const std::vector<Box>& cells, const std::vector<Index>& n, double alpha, Index N) {
  if (cells.size() != n.size()) fail(ErrorKind::Invalid, "one time per cell is required");
  const std::size_t q = cells.size();
  if (q == 0) return 0;
  const int d = static_cast<int>(cells.front().lo.size());
  // keep[b][h][l] for sup value h of cell k and inf value l of cell j.
  std::vector<Levels> his, los;
  std::vector<std::vector<long double>> keep;
  for (int b = 0; b < d; ++b) {
    std::vector<double> h, l;
    for (const auto& c : cells) {
      h.push_back(c.hi[b]);
      l.push_back(c.lo[b]);
    }
    his.push_back(levels(h));
    los.push_back(levels(l));
    const auto& H = his.back().values;
    const auto& L = los.back().values;
    std::vector<long double> t(H.size() * L.size(), 1.0L);
    for (std::size_t x = 0; x < H.size(); ++x)
      for (std::size_t y = 0; y < L.size(); ++y)
        if (L[y] < H[x]) t[x * L.size() + y] = L[y] > 0.0 ? saut_keep(H[x], L[y], alpha) : 0.0L;
    keep.push_back(std::move(t));
  }
  std::atomic<std::size_t> bad{0};
  for (std::size_t j = 1; j < q; ++j)
    if (n[j] < n[j - 1] + N) ++bad;
  parallel_for(q, [&](std::size_t j) {
    std::size_t local = 0;
    for (std::size_t k = 0; k < j; ++k)
      for (int b = 0; b < d; ++b) {
        const long double f = keep[b][his[b].of[k] * los[b].values.size() + los[b].of[j]];
        if (static_cast<long double>(n[j]) * f < static_cast<long double>(n[k])) {
          ++local;
          break;
        }
      }
    bad += local;
  });
  return bad.load();
}

double saut2_constant(const std::vector<Box>& cells, const std::vector<Index>& n, double alpha, std::size_t max_lag) {
  if (cells.size() != n.size()) fail(ErrorKind::Invalid, "one time per cell is required");
  const std::size_t q = cells.size();
  if (q < 2) return 0.0;
  const int d = static_cast<int>(cells.front().lo.size());
  const double inv = 1.0 / alpha;
  // dist^{1/alpha} = max over axes of (hi - lo)^{1/alpha} for the two
  // orientations; tabulate the powers per (sup level, inf level).
  std::vector<Levels> his, los;
  std::vector<std::vector<double>> pw;
  for (int b = 0; b < d; ++b) {
    std::vector<double> h, l;
    for (const auto& c : cells) {
      h.push_back(c.hi[b]);
      l.push_back(c.lo[b]);
    }
    his.push_back(levels(h));
    los.push_back(levels(l));
    const auto& H = his.back().values;
    const auto& L = los.back().values;
    std::vector<double> t(H.size() * L.size(), 0.0);
    for (std::size_t x = 0; x < H.size(); ++x)
      for (std::size_t y = 0; y < L.size(); ++y) t[x * L.size() + y] = H[x] > L[y] ? std::pow(H[x] - L[y], inv) : 0.0;
    pw.push_back(std::move(t));
  }
  // D^{1/alpha} = max dist^{1/alpha} n_k / (n_j - n_k).
  std::vector<double> worst(q, 0.0);
  parallel_for(q, [&](std::size_t j) {
    double best = 0.0;
    const std::size_t k0 = j > max_lag ? j - max_lag : 0;
    for (std::size_t k = k0; k < j; ++k) {
      double dp = 0.0;
      for (int b = 0; b < d; ++b) {
        const std::size_t nl = los[b].values.size();
        dp = std::max({dp, pw[b][his[b].of[j] * nl + los[b].of[k]], pw[b][his[b].of[k] * nl + los[b].of[j]]});
      }
      const double gap = static_cast<double>(n[j] - n[k]);
      best = std::max(best, gap > 0.0 ? dp * static_cast<double>(n[k]) / gap : kInf);
    }
    worst[j] = best;
  });
  double m = 0.0;
  for (double x : worst) m = std::max(m, x);
  return std::pow(m, alpha);
}

OrderingExperiment ordering_cost(const OrderingParams& p, Ordering o) {
  if (p.m < 0 || p.m > 8) fail(ErrorKind::Invalid, "ordering experiment depth must be in 0..8");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) fail(ErrorKind::Invalid, "alpha must lie in (0,1)");
  if (p.N < 1) fail(ErrorKind::Invalid, "spacing N must be >= 1");
  OrderingExperiment ex;
  ex.params = p;
  ex.ordering = o;
  ex.cells = ordered_cells(p.m, o);
  const std::size_t q = ex.cells.size();
  const std::int64_t side = std::int64_t{1} << p.m;
  const double w = std::ldexp(1.0, -p.m);

  // Earlier cells sharing a sup value along an axis constrain n_j only
  // through their largest n, so keep the running max per (axis, sup level).
  std::vector<std::vector<Index>> best(2, std::vector<Index>(static_cast<std::size_t>(side), -1));
  ex.n.assign(q, 0);
  for (std::size_t j = 0; j < q; ++j) {
    const Box& c = ex.cells[j];
    Index nj = j == 0 ? p.N : ex.n[j - 1] + p.N;
    for (int b = 0; b < 2; ++b) {
      const auto l = static_cast<std::int64_t>(std::llround((c.lo[b] - 1.0) / w));
      for (std::int64_t h = l; h < side; ++h) {
        const Index nk = best[b][static_cast<std::size_t>(h)];
        if (nk < 0) continue;
        nj = std::max(nj, saut_bound(1.0 + static_cast<double>(h + 1) * w, c.lo[b], p.alpha, nk));
      }
    }
    ex.n[j] = nj;
    for (int b = 0; b < 2; ++b) {
      const auto h = static_cast<std::size_t>(std::llround((c.hi[b] - 1.0) / w) - 1);
      best[b][h] = std::max(best[b][h], nj);
    }
  }
  ex.n_final = ex.n.back();
  const double cap = std::ldexp(p.slack, p.m);
  ex.threshold = std::pow(cap, 1.0 / p.alpha);
  ex.admissible = std::pow(static_cast<double>(ex.n_final), p.alpha) <= cap;
  ex.saut_violations = saut_violations(ex.cells, ex.n, p.alpha, p.N);
  ex.D_star = saut2_constant(ex.cells, ex.n, p.alpha);
  ex.D_local = saut2_constant(ex.cells, ex.n, p.alpha, 1);
  ex.saut2 = ex.D_star <= p.D_ref;
  return ex;
}

CombCount comb_count(int m) {
  if (m < 2 || m > 26) fail(ErrorKind::Invalid, "comb depth must be in 2..26");
  CombCount c;
  c.m = m;
  c.count = box_count(ParamSet::comb(m + 1), std::ldexp(1.0, -m));
  c.lower = (std::ldexp(1.0, m - 1) - 1.0) * std::ldexp(1.0, m) / (m - 1);
  c.realized_c = static_cast<double>(c.count) * m / std::ldexp(1.0, 2 * m);
  return c;
}

double dimension_ceiling(const WeightFamily& w) {
  auto m = w.lipschitz_model();
  if (!m || m->scale != LipschitzModel::Scale::Power || !(m->c_lower > 0.0)) return kInf;
  return 1.0 / m->alpha;
}

}  // namespace hclab
