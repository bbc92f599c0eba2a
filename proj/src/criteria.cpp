#include "hclab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "hclab/errors.hpp"
#include "hclab/parallel.hpp"

namespace hclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string point_str(const double* p, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) s += fmt::format("{}{:.9g}", i ? "," : "", p[i]);
  return s + ")";
}

Clause spacing_clause(const Schedule& s, double N) {
  double margin = static_cast<double>(s.entries.front().n) - N;
  std::string w = "n_1";
  for (std::size_t k = 1; k < s.size(); ++k) {
    double g = static_cast<double>(s.entries[k].n - s.entries[k - 1].n) - N;
    if (g < margin) {
      margin = g;
      w = fmt::format("k={}", k + 1);
    }
  }
  return weak_clause("spacing", margin, w);
}

// Coverage of K's samples by boxes [anchor - radius_k, anchor]. The margin
// is the worst depth of a sample inside its best box (negative distance to
// the nearest box when uncovered).
Clause anchored_cover_clause(const Schedule& s, const ParamSet& K, const std::function<double(std::size_t)>& radius,
                             const std::string& id) {
  std::vector<Box> boxes;
  boxes.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    Box b;
    b.hi = s.entries[k].anchor;
    b.lo = b.hi;
    for (auto& x : b.lo) x -= radius(k);
    boxes.push_back(std::move(b));
  }
  BoxIndex index(boxes, kBoxTol);
  PointCloud P = sample_points(K);
  std::vector<double> depth(P.size(), kInf);
  parallel_for(P.size(), [&](std::size_t i) {
    const double* p = P.at(i);
    double best = -kInf;
    for (std::size_t k : index.query(p)) {
      double dd = kInf;
      for (int b = 0; b < P.d; ++b) dd = std::min({dd, p[b] - boxes[k].lo[b], boxes[k].hi[b] - p[b]});
      best = std::max(best, dd);
    }
    if (best == -kInf) {
      double dist = kInf;
      for (const auto& b : boxes) dist = std::min(dist, sup_dist_to_box(p, b));
      best = -dist;
    }
    depth[i] = best;
  });
  double margin = kInf;
  std::size_t arg = 0, uncovered = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (depth[i] < -kBoxTol) ++uncovered;
    if (depth[i] < margin) {
      margin = depth[i];
      arg = i;
    }
  }
  Clause c{id, uncovered == 0 ? Status::Pass : Status::Fail, margin,
           fmt::format("sample {} {}", arg, P.empty() ? "" : point_str(P.at(arg), P.d))};
  if (uncovered) c.witness += fmt::format("; {} of {} samples uncovered", uncovered, P.size());
  return c;
}

Clause anchors_positive(const Schedule& s) {
  double m = kInf;
  std::string w;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t i = 0; i < s.entries[k].anchor.size(); ++i)
      if (s.entries[k].anchor[i] < m) {
        m = s.entries[k].anchor[i];
        w = fmt::format("k={} i={}", k + 1, i);
      }
  return strict_clause("anchors", m, w);
}

Clause from_worst(const std::string& id, double eps, double worst, const std::string& witness) {
  if (!std::isfinite(worst) && worst != -kInf) return {id, Status::Indeterminate, 0.0, witness + " (non-finite norm)"};
  return strict_clause(id, eps - std::max(worst, 0.0), witness);
}

}  // namespace

CriterionReport check_caracstandard(const Schedule& s, const ParamSet& K, double tau, double N) {
  CriterionReport rep;
  rep.criterion = "caracstandard";
  if (s.size() == 0) fail(ErrorKind::Invalid, "empty schedule");
  rep.add(anchors_positive(s));
  rep.add(spacing_clause(s, N));
  rep.add(anchored_cover_clause(
      s, K, [&](std::size_t k) { return tau / static_cast<double>(s.entries[k].n); }, "i"));
  if (s.size() < 2) {
    rep.add({"ii", Status::NotApplicable, 0.0, "q=1"});
    return rep;
  }
  double margin = kInf;
  std::string w;
  for (std::size_t k = 0; k + 1 < s.size(); ++k)
    for (std::size_t i = 0; i < s.entries[k].anchor.size(); ++i) {
      double g = s.entries[k + 1].anchor[i] * static_cast<double>(s.entries[k + 1].n) -
                 s.entries[k].anchor[i] * static_cast<double>(s.entries[k].n) - N;
      if (g < margin) {
        margin = g;
        w = fmt::format("k={} i={}", k + 1, i);
      }
    }
  rep.add(weak_clause("ii", margin, w));
  return rep;
}

CriterionReport check_walpha(const Schedule& s, double alpha, double N) {
  CriterionReport rep;
  rep.criterion = "walpha";
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Invalid, "walpha needs alpha in (0,1]");
  const std::size_t q = s.size();
  if (q < 2) {
    rep.add({"walpha", Status::NotApplicable, 0.0, "q=1"});
    return rep;
  }
  std::vector<double> best(q, kInf);
  std::vector<std::size_t> bj(q, 0), bi(q, 0);
  parallel_for(q, [&](std::size_t k) {
    const auto& ek = s.entries[k];
    for (std::size_t j = k + 1; j < q; ++j) {
      const auto& ej = s.entries[j];
      const double nja = std::pow(static_cast<double>(ej.n), alpha);
      const double gap = std::pow(static_cast<double>(ej.n - ek.n), alpha);
      for (std::size_t i = 0; i < ek.anchor.size(); ++i) {
        double g = (ej.anchor[i] - ek.anchor[i]) * nja + ek.anchor[i] * gap - N;
        if (g < best[k]) {
          best[k] = g;
          bj[k] = j;
          bi[k] = i;
        }
      }
    }
  });
  double margin = kInf;
  std::string w;
  for (std::size_t k = 0; k + 1 < q; ++k)
    if (best[k] < margin) {
      margin = best[k];
      w = fmt::format("k={} j={} i={}", k + 1, bj[k] + 1, bi[k]);
    }
  rep.add(strict_clause("walpha", margin, w));
  return rep;
}

CriterionReport check_carac_general(const Schedule& s, const WeightFamily& w, const std::function<double(Index)>& F,
                                    const ParamSet& K, double tau, Index N, double eps, const CaracOptions& opt) {
  CriterionReport rep;
  rep.criterion = "carac";
  const std::size_t q = s.size();
  if (q == 0) fail(ErrorKind::Invalid, "empty schedule");
  const int d = s.d;
  rep.add(spacing_clause(s, static_cast<double>(N)));
  rep.add(anchored_cover_clause(
      s, K, [&](std::size_t k) { return tau / F(s.entries[k].n); }, "i"));

  {  // (ii)
    double worst = -kInf;
    std::string wit;
    for (int i = 0; i < d; ++i) {
      LogSparseVector x;
      for (const auto& e : s.entries) x.add(e.n, -w.f(e.anchor[i], e.n), 1);
      double nv = x.norm(opt.norm);
      if (!(nv <= worst)) {
        worst = nv;
        wit = fmt::format("i={}", i);
      }
    }
    rep.add(from_worst("ii", eps, worst, wit));
  }

  if (q < 2) {
    rep.add({"iii", Status::Pass, eps, "q=1, vacuous"});
    return rep;
  }
  const double terms = 0.5 * static_cast<double>(q) * static_cast<double>(q - 1) * d * static_cast<double>(N + 1);
  if (terms > static_cast<double>(opt.pair_budget))
    fail(ErrorKind::Capacity, fmt::format("clause iii needs {:.3g} terms, budget is {}", terms, opt.pair_budget));
  std::vector<double> worst(q, -kInf);
  std::vector<std::string> wit(q);
  parallel_for(q - 1, [&](std::size_t k) {
    const auto& ek = s.entries[k];
    for (int i = 0; i < d; ++i)
      for (Index l = 0; l <= N; ++l) {
        LogSparseVector x;
        for (std::size_t j = k + 1; j < q; ++j) {
          const auto& ej = s.entries[j];
          const Index gap = ej.n - ek.n;
          double lg = w.log_product(ek.anchor[i], gap + l, ek.n) - w.log_product(ej.anchor[i], l, ej.n);
          x.add(gap + l, lg, 1);
        }
        double nv = x.norm(opt.norm);
        if (!(nv <= worst[k])) {
          worst[k] = nv;
          wit[k] = fmt::format("k={} i={} l={}", k + 1, i, l);
        }
      }
  });
  double wv = -kInf;
  std::string ww;
  for (std::size_t k = 0; k + 1 < q; ++k)
    if (!(worst[k] <= wv)) {
      wv = worst[k];
      ww = wit[k];
    }
  rep.add(from_worst("iii", eps, wv, ww));
  return rep;
}

std::vector<ProductParam> lambda_samples(const Cell& cell, std::size_t count) {
  std::vector<ProductParam> out;
  const std::size_t S = cell.samples.size();
  if (S == 0 || count == 0) return out;
  if (S <= count) {
    for (std::size_t i = 0; i < S; ++i) out.push_back(cell.samples.point(i));
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t idx = count == 1 ? 0 : i * (S - 1) / (count - 1);
    out.push_back(cell.samples.point(idx));
  }
  return out;
}

CriterionReport check_basic_criterion(const Schedule& s, const WeightFamily& w, const LogTuple& u, const LogTuple& v,
                                      double eps, const ParamSet& K, const BasicOptions& opt) {
  CriterionReport rep;
  rep.criterion = "basic";
  const std::size_t q = s.size();
  if (q == 0) fail(ErrorKind::Invalid, "empty schedule");
  const int d = s.d;
  if (static_cast<int>(u.size()) != d || static_cast<int>(v.size()) != d)
    fail(ErrorKind::Invalid, "u and v must be d-tuples");

  {  // BC1 on cell bounding boxes
    std::vector<Box> boxes;
    for (const auto& c : s.cells)
      if (!c.empty()) boxes.push_back(c.box);
    BoxIndex index(boxes, sample_resolution(K) + kBoxTol);
    PointCloud P = sample_points(K);
    std::size_t uncovered = 0, first = 0;
    for (std::size_t i = 0; i < P.size(); ++i)
      if (!index.any(P.at(i)) && uncovered++ == 0) first = i;
    if (uncovered)
      rep.add({"BC1", Status::Fail, -1.0,
               fmt::format("{} of {} samples uncovered, first {}", uncovered, P.size(), point_str(P.at(first), d))});
    else
      rep.add({"BC1", Status::Pass, 0.0, fmt::format("{} samples covered", P.size())});
  }

  std::vector<LogTuple> blocks(q);
  for (std::size_t k = 0; k < q; ++k) blocks[k] = tuple_forward(w, s.entries[k].anchor, v, s.entries[k].n);

  {  // BC2
    LogTuple sum(d);
    for (const auto& b : blocks) sum = tuple_sum(sum, b);
    rep.add(from_worst("BC2", eps, tuple_norm(sum, opt.norm), ""));
  }

  std::size_t per_cell = 1;
  for (int i = 0; i < d; ++i) per_cell *= static_cast<std::size_t>(opt.lambda_per_axis);
  std::vector<Index> block_max(q), block_nnz(q, 0);
  for (std::size_t k = 0; k < q; ++k) {
    block_max[k] = tuple_max_index(blocks[k]);
    for (const auto& c : blocks[k]) block_nnz[k] += static_cast<Index>(c.nnz());
  }
  // Blocks whose support reaches n_k contribute to BC3 at k.
  double evals = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    double nn = 0.0;
    for (std::size_t j = 0; j < q; ++j)
      if (j != k && block_max[j] >= s.entries[k].n) nn += static_cast<double>(block_nnz[j]);
    evals += nn * static_cast<double>(std::min(per_cell, s.cells[k].samples.size()));
  }
  if (evals > static_cast<double>(opt.eval_budget))
    fail(ErrorKind::Capacity, fmt::format("BC3 needs {:.3g} shifted coefficients, budget is {}", evals, opt.eval_budget));

  struct Worst {
    double bc3 = -kInf, bc4 = -kInf, bc5 = -kInf;
    std::string w3, w4, w5;
  };
  std::vector<Worst> worst(q);
  parallel_for(q, [&](std::size_t k) {
    const auto& ek = s.entries[k];
    Worst& W = worst[k];
    for (const auto& lam : lambda_samples(s.cells[k], per_cell)) {
      const std::string where = fmt::format("k={} lambda={}", k + 1, point_str(lam.data(), d));
      double n4 = tuple_norm(tuple_backward(w, lam, u, ek.n), opt.norm);
      if (!(n4 <= W.bc4)) W.bc4 = n4, W.w4 = where;
      double n5 = tuple_dist(tuple_backward(w, lam, blocks[k], ek.n), v, opt.norm);
      if (!(n5 <= W.bc5)) W.bc5 = n5, W.w5 = where;
      double n3 = 0.0;
      for (int i = 0; i < d; ++i) {
        LogSparseVector z;
        for (std::size_t j = 0; j < q; ++j) {
          if (j == k || block_max[j] < ek.n) continue;
          for (const auto& e : blocks[j][i].entries()) {
            if (e.index < ek.n) continue;
            const Index m = e.index - ek.n;
            z.add(m, e.logmag + w.log_product(lam[i], m, ek.n), e.sign);
          }
        }
        n3 = std::max(n3, z.norm(opt.norm));
      }
      if (!(n3 <= W.bc3)) W.bc3 = n3, W.w3 = where;
    }
  });
  Worst total;
  for (const auto& W : worst) {
    if (!(W.bc3 <= total.bc3)) total.bc3 = W.bc3, total.w3 = W.w3;
    if (!(W.bc4 <= total.bc4)) total.bc4 = W.bc4, total.w4 = W.w4;
    if (!(W.bc5 <= total.bc5)) total.bc5 = W.bc5, total.w5 = W.w5;
  }
  rep.add(from_worst("BC3", eps, total.bc3, total.w3));
  rep.add(from_worst("BC4", eps, total.bc4, total.w4));
  rep.add(from_worst("BC5", eps, total.bc5, total.w5));
  return rep;
}

namespace {

// Value at the grid point nearest to n (grid sorted).
std::size_t nearest(const std::vector<Index>& ns, double n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (std::fabs(std::log(static_cast<double>(ns[i]) / n)) < std::fabs(std::log(static_cast<double>(ns[best]) / n)))
      best = i;
  return best;
}

double max_over(const std::vector<Index>& ns, const std::vector<double>& vals, double lo, double hi) {
  double m = -kInf;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] >= lo && ns[i] <= hi) m = std::max(m, vals[i]);
  return m;
}

}  // namespace

HypothesisEstimate estimate_hypotheses(const WeightFamily& w, Interval I, double alpha, const HypothesisGrid& grid) {
  if (!(std::isfinite(I.lo) && std::isfinite(I.hi) && I.lo < I.hi))
    fail(ErrorKind::Invalid, "hypothesis estimation needs a bounded interval");
  if (grid.a_points < 2 || grid.n_max < 1000 || grid.per_decade < 2)
    fail(ErrorKind::InsufficientData, "grid needs >= 2 parameters and n_max >= 1000");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Invalid, "alpha must lie in (0,1]");
  HypothesisEstimate h;
  h.alpha = alpha;

  std::vector<Index> ns;
  for (Index n = 1; n <= std::min<Index>(10, grid.n_max); ++n) ns.push_back(n);
  const double step = std::pow(10.0, 1.0 / grid.per_decade);
  for (double x = 10.0 * step; x <= static_cast<double>(grid.n_max) * (1.0 + 1e-12); x *= step)
    ns.push_back(static_cast<Index>(std::llround(x)));
  ns.push_back(grid.n_max);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<double> as(grid.a_points);
  for (int t = 0; t < grid.a_points; ++t) as[t] = I.lo + (I.hi - I.lo) * t / (grid.a_points - 1);

  const std::size_t K = ns.size();
  std::vector<double> lip(K), g(K);
  for (std::size_t i = 0; i < K; ++i) {
    double L = 0.0, mn = kInf, prev = 0.0;
    for (int t = 0; t < grid.a_points; ++t) {
      double f = w.f(as[t], ns[i]);
      mn = std::min(mn, f);
      if (t > 0) L = std::max(L, std::fabs(f - prev) / (as[t] - as[t - 1]));
      prev = f;
    }
    lip[i] = L;
    g[i] = mn;
  }

  std::vector<double> rp(K), rl(K, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    rp[i] = lip[i] / std::pow(static_cast<double>(ns[i]), alpha);
    if (ns[i] >= 2) rl[i] = lip[i] / std::log(static_cast<double>(ns[i]));
  }
  h.C1_power = *std::max_element(rp.begin(), rp.end());
  h.C1_log = *std::max_element(rl.begin(), rl.end());

  const double nmax = static_cast<double>(grid.n_max);
  const double top_lo = nmax / 10.0, prev_lo = nmax / 100.0;
  const bool pow_bounded = max_over(ns, rp, top_lo, nmax) <= 1.1 * max_over(ns, rp, prev_lo, top_lo) + 1e-12;
  const bool log_bounded = max_over(ns, rl, top_lo, nmax) <= 1.1 * max_over(ns, rl, prev_lo, top_lo) + 1e-12;

  const std::size_t i2 = nearest(ns, nmax), i1 = nearest(ns, top_lo), i0 = nearest(ns, prev_lo);
  auto slope = [&](std::size_t a, std::size_t b, const std::function<double(double)>& S) {
    return (g[b] - g[a]) / (S(static_cast<double>(ns[b])) - S(static_cast<double>(ns[a])));
  };
  auto spow = [&](double n) { return std::pow(n, alpha); };
  auto slog = [](double n) { return std::log(n); };
  const double c3_top = slope(i1, i2, spow), c3_prev = slope(i0, i1, spow);
  const double k_top = slope(i1, i2, slog), k_prev = slope(i0, i1, slog);

  for (std::size_t i = 1; i < K; ++i)
    if (g[i] < g[i - 1]) {
      h.diagnostics.push_back(fmt::format("inf_a f_n(a) decreases between n={} and n={}", ns[i - 1], ns[i]));
      break;
    }
  if (!pow_bounded) h.diagnostics.push_back("Lipschitz ratio against n^alpha still grows over the top decade");
  if (!log_bounded) h.diagnostics.push_back("Lipschitz ratio against log n still grows over the top decade");

  if (c3_top > 0.0) {
    h.C3 = c3_top;
    double m = kInf;
    for (std::size_t i = 0; i < K; ++i) m = std::min(m, g[i] - h.C3 * spow(static_cast<double>(ns[i])));
    h.C2_power = std::exp(m);
  }
  if (k_top > 0.0) {
    h.kappa = k_top;
    double m = kInf;
    for (std::size_t i = 0; i < K; ++i) m = std::min(m, g[i] - h.kappa * slog(static_cast<double>(ns[i])));
    h.C2_log = std::exp(m);
  }
  h.critere1 = pow_bounded && c3_top > 0.0 && c3_top >= 0.9 * c3_prev;
  h.critere2 = log_bounded && k_top > 0.0 && k_top >= 0.9 * k_prev;
  if (c3_top > 0.0 && c3_top < 0.9 * c3_prev)
    h.diagnostics.push_back(fmt::format("growth against n^alpha decays: slope {:.6g} after {:.6g}", c3_top, c3_prev));
  return h;
}

}  // namespace hclab
