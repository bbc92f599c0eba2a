#include "hclab/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "hclab/errors.hpp"

namespace hclab {

NormTag NormTag::ellp(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorKind::Invalid, fmt::format("l_p norm needs p >= 1, got {}", p));
  return {Kind::Ellp, p};
}

std::string to_string(const NormTag& t) {
  if (t.kind == NormTag::Kind::Sup) return "sup";
  return fmt::format("l{}", t.p);
}

NormTag parse_norm_tag(const std::string& s) {
  if (s == "sup" || s == "c0") return NormTag::sup();
  if (s.size() > 1 && s[0] == 'l') {
    try {
      std::size_t used = 0;
      double p = std::stod(s.substr(1), &used);
      if (used == s.size() - 1) return NormTag::ellp(p);
    } catch (const std::logic_error&) {
    }
  }
  fail(ErrorKind::Invalid, "unknown norm tag '" + s + "'");
}

TruncatedVector::TruncatedVector(std::vector<double> c, NormTag tag) : coeffs(std::move(c)), norm_tag(tag) {
  for (double v : coeffs)
    if (!std::isfinite(v)) fail(ErrorKind::Invalid, "coefficients must be finite");
}

TruncatedVector TruncatedVector::zeros(std::size_t L, NormTag tag) {
  return TruncatedVector(std::vector<double>(L, 0.0), tag);
}

TruncatedVector TruncatedVector::basis(std::size_t L, std::size_t i, NormTag tag) {
  if (i >= L) fail(ErrorKind::Range, "basis index outside truncation");
  auto v = zeros(L, tag);
  v.coeffs[i] = 1.0;
  return v;
}

double TruncatedVector::norm() const {
  double mx = 0.0;
  for (double v : coeffs) mx = std::max(mx, std::fabs(v));
  if (norm_tag.kind == NormTag::Kind::Sup || mx == 0.0) return mx;
  // Scale by the max entry so large p cannot overflow.
  double s = 0.0;
  for (double v : coeffs) s += std::pow(std::fabs(v) / mx, norm_tag.p);
  return mx * std::pow(s, 1.0 / norm_tag.p);
}

TruncatedVector operator+(const TruncatedVector& a, const TruncatedVector& b) {
  TruncatedVector r = TruncatedVector::zeros(std::max(a.size(), b.size()), a.norm_tag);
  for (std::size_t i = 0; i < a.size(); ++i) r.coeffs[i] += a.coeffs[i];
  for (std::size_t i = 0; i < b.size(); ++i) r.coeffs[i] += b.coeffs[i];
  r.saturated = a.saturated || b.saturated;
  r.degenerate = a.degenerate || b.degenerate;
  return r;
}

TruncatedVector operator*(double s, const TruncatedVector& a) {
  TruncatedVector r = a;
  for (double& v : r.coeffs) v *= s;
  return r;
}

const char* to_string(WeightKind k) {
  switch (k) {
    case WeightKind::ExpPower: return "exp_power";
    case WeightKind::OnePlusPower: return "one_plus_power";
    case WeightKind::Rolewicz: return "rolewicz";
    case WeightKind::PolyLog: return "poly_log";
    case WeightKind::OnePlusOverN: return "one_plus_over_n";
    case WeightKind::PowerBase: return "power_base";
    case WeightKind::Tabulated: return "tabulated";
  }
  return "?";
}

WeightKind parse_weight_kind(const std::string& s) {
  for (auto k : {WeightKind::ExpPower, WeightKind::OnePlusPower, WeightKind::Rolewicz, WeightKind::PolyLog,
                 WeightKind::OnePlusOverN, WeightKind::PowerBase, WeightKind::Tabulated})
    if (s == to_string(k)) return k;
  fail(ErrorKind::Invalid, "unknown weight kind '" + s + "'");
}

double LipschitzModel::F(Index n) const {
  switch (scale) {
    case Scale::Power: return std::pow(static_cast<double>(n), alpha);
    case Scale::Log: return std::log(static_cast<double>(std::max<Index>(n, 1)));
    case Scale::LogPlusOne: return std::log(static_cast<double>(n) + 1.0);
  }
  return 0.0;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Invalid, fmt::format("alpha must lie in (0,1], got {}", alpha));
}

void check_interval(const Interval& d) {
  if (!(d.lo <= d.hi)) fail(ErrorKind::Invalid, "weight domain must satisfy lo <= hi");
}

// (l+n)^alpha - l^alpha without cancellation for large l.
double power_increment(double alpha, Index l, Index n) {
  if (l == 0) return std::pow(static_cast<double>(n), alpha);
  double ld = static_cast<double>(l);
  return std::pow(ld, alpha) * std::expm1(alpha * std::log1p(static_cast<double>(n) / ld));
}

constexpr Index kDirectSumLimit = 1 << 16;

}  // namespace

WeightFamily WeightFamily::exp_power(double alpha, Interval dom) {
  check_alpha(alpha);
  check_interval(dom);
  WeightFamily w;
  w.kind_ = WeightKind::ExpPower;
  w.alpha_ = alpha;
  w.dom_ = dom;
  return w;
}

WeightFamily WeightFamily::one_plus_power(double alpha, Interval dom) {
  check_alpha(alpha);
  check_interval(dom);
  if (!(dom.lo > -1.0)) fail(ErrorKind::Invalid, "1 + a/n^(1-alpha) needs a > -1 for positive weights");
  WeightFamily w;
  w.kind_ = WeightKind::OnePlusPower;
  w.alpha_ = alpha;
  w.dom_ = dom;
  return w;
}

WeightFamily WeightFamily::rolewicz(Interval dom) {
  check_interval(dom);
  WeightFamily w;
  w.kind_ = WeightKind::Rolewicz;
  w.dom_ = dom;
  return w;
}

WeightFamily WeightFamily::poly_log(Interval dom, double base, double alpha) {
  check_interval(dom);
  check_alpha(alpha);
  if (!(base > 1.0)) fail(ErrorKind::Invalid, "poly_log base must exceed 1");
  WeightFamily w;
  w.kind_ = WeightKind::PolyLog;
  w.alpha_ = alpha;
  w.base_ = base;
  w.dom_ = dom;
  return w;
}

WeightFamily WeightFamily::one_plus_over_n(Interval dom) {
  check_interval(dom);
  if (!(dom.lo > -1.0)) fail(ErrorKind::Invalid, "1 + a/n needs a > -1 for positive weights");
  WeightFamily w;
  w.kind_ = WeightKind::OnePlusOverN;
  w.dom_ = dom;
  return w;
}

WeightFamily WeightFamily::power_base(Interval dom) {
  check_interval(dom);
  WeightFamily w;
  w.kind_ = WeightKind::PowerBase;
  w.dom_ = dom;
  return w;
}

WeightFamily WeightFamily::tabulated(std::vector<double> a_nodes, std::vector<std::vector<double>> rows,
                                     Interval dom) {
  if (a_nodes.empty() || a_nodes.size() != rows.size())
    fail(ErrorKind::Invalid, "tabulated family needs one row per a-node");
  if (!std::is_sorted(a_nodes.begin(), a_nodes.end()) ||
      std::adjacent_find(a_nodes.begin(), a_nodes.end()) != a_nodes.end())
    fail(ErrorKind::Invalid, "tabulated a-nodes must be strictly increasing");
  const std::size_t T = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != T) fail(ErrorKind::Invalid, "tabulated rows must have equal length");
    for (double v : r)
      if (!std::isfinite(v)) fail(ErrorKind::Invalid, "tabulated log-weights must be finite");
  }
  check_interval(dom);
  WeightFamily w;
  w.kind_ = WeightKind::Tabulated;
  w.dom_ = {std::max(dom.lo, a_nodes.front()), std::min(dom.hi, a_nodes.back())};
  w.nodes_ = std::move(a_nodes);
  w.rows_ = std::move(rows);
  w.prefix_.resize(w.rows_.size());
  for (std::size_t i = 0; i < w.rows_.size(); ++i) {
    auto& p = w.prefix_[i];
    p.assign(T + 1, 0.0L);
    for (std::size_t j = 0; j < T; ++j) p[j + 1] = p[j] + static_cast<long double>(w.rows_[i][j]);
  }
  return w;
}

WeightFamily WeightFamily::tabulate(const WeightFamily& src, std::vector<double> a_nodes, Index n_max) {
  if (n_max < 1) fail(ErrorKind::Invalid, "tabulation length must be >= 1");
  std::vector<std::vector<double>> rows;
  rows.reserve(a_nodes.size());
  for (double a : a_nodes) {
    std::vector<double> r(static_cast<std::size_t>(n_max));
    for (Index j = 1; j <= n_max; ++j) r[j - 1] = src.log_weight(j, a);
    rows.push_back(std::move(r));
  }
  return tabulated(std::move(a_nodes), std::move(rows), src.domain());
}

Index WeightFamily::table_size() const {
  return kind_ == WeightKind::Tabulated ? static_cast<Index>(rows_.front().size()) : 0;
}

void WeightFamily::check_domain(double a) const {
  if (!std::isfinite(a) || !dom_.contains(a))
    fail(ErrorKind::Domain, fmt::format("parameter a={} outside [{}, {}] for {}", a, dom_.lo, dom_.hi, to_string(kind_)));
}

double WeightFamily::log_weight(Index j, double a) const {
  if (j < 1) fail(ErrorKind::Range, "weights are indexed from 1");
  check_domain(a);
  const double jd = static_cast<double>(j);
  switch (kind_) {
    case WeightKind::ExpPower: return a * power_increment(alpha_, j - 1, 1);
    case WeightKind::OnePlusPower: return std::log1p(a * std::pow(jd, alpha_ - 1.0));
    case WeightKind::Rolewicz: return a;
    case WeightKind::PolyLog:
      return std::log(base_) * power_increment(alpha_, j - 1, 1) + (j == 1 ? 0.0 : a * std::log1p(1.0 / (jd - 1.0)));
    case WeightKind::OnePlusOverN: return std::log1p(a / jd);
    case WeightKind::PowerBase: return a * std::log1p(1.0 / jd);
    case WeightKind::Tabulated: return log_product(a, j - 1, 1);
  }
  return 0.0;
}

double WeightFamily::log_product(double a, Index l, Index n) const {
  if (l < 0 || n < 0) fail(ErrorKind::Range, "log_product needs l >= 0 and n >= 0");
  check_domain(a);
  if (n == 0) return 0.0;
  const double ld = static_cast<double>(l);
  const double nd = static_cast<double>(n);
  switch (kind_) {
    case WeightKind::ExpPower: return a * power_increment(alpha_, l, n);
    case WeightKind::Rolewicz: return a * nd;
    case WeightKind::PolyLog:
      return std::log(base_) * power_increment(alpha_, l, n) + a * (l == 0 ? std::log(nd) : std::log1p(nd / ld));
    case WeightKind::PowerBase: return a * std::log1p(nd / (ld + 1.0));
    case WeightKind::OnePlusOverN: {
      if (n <= kDirectSumLimit) {
        double s = 0.0;
        for (Index j = l + 1; j <= l + n; ++j) s += std::log1p(a / static_cast<double>(j));
        return s;
      }
      // prod_{j=l+1}^{l+n} (j+a)/j = Gamma(l+n+1+a) Gamma(l+1) / (Gamma(l+1+a) Gamma(l+n+1))
      return (std::lgamma(ld + nd + 1.0 + a) - std::lgamma(ld + nd + 1.0)) - (std::lgamma(ld + 1.0 + a) - std::lgamma(ld + 1.0));
    }
    case WeightKind::OnePlusPower: {
      double s = 0.0, comp = 0.0;
      for (Index j = l + 1; j <= l + n; ++j) {
        double y = std::log1p(a * std::pow(static_cast<double>(j), alpha_ - 1.0)) - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
      }
      return s;
    }
    case WeightKind::Tabulated: {
      if (l + n > table_size())
        fail(ErrorKind::Range, fmt::format("tabulated family covers n <= {}, asked for {}", table_size(), l + n));
      auto at = [&](std::size_t i) { return static_cast<double>(prefix_[i][l + n] - prefix_[i][l]); };
      if (nodes_.size() == 1) return at(0);
      auto it = std::upper_bound(nodes_.begin(), nodes_.end(), a);
      std::size_t hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - nodes_.begin(), nodes_.size() - 1));
      std::size_t lo = hi - 1;
      double t = (a - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
      if (t == 0.0) return at(lo);
      if (t == 1.0) return at(hi);
      return (1.0 - t) * at(lo) + t * at(hi);
    }
  }
  return 0.0;
}

std::vector<double> WeightFamily::prefix(double a, Index upto) const {
  check_domain(a);
  std::vector<double> p(static_cast<std::size_t>(upto) + 1, 0.0);
  if (has_closed_form()) {
    for (Index m = 1; m <= upto; ++m) p[m] = log_product(a, 0, m);
    return p;
  }
  if (kind_ == WeightKind::Tabulated && upto > table_size())
    fail(ErrorKind::Range, fmt::format("tabulated family covers n <= {}, asked for {}", table_size(), upto));
  long double acc = 0.0L;
  for (Index m = 1; m <= upto; ++m) {
    acc += static_cast<long double>(log_weight(m, a));
    p[m] = static_cast<double>(acc);
  }
  return p;
}

bool WeightFamily::has_closed_form() const {
  return kind_ == WeightKind::ExpPower || kind_ == WeightKind::Rolewicz || kind_ == WeightKind::PolyLog ||
         kind_ == WeightKind::PowerBase;
}

std::optional<LipschitzModel> WeightFamily::lipschitz_model() const {
  using S = LipschitzModel::Scale;
  switch (kind_) {
    case WeightKind::ExpPower: return LipschitzModel{S::Power, alpha_, 1.0, 1.0};
    case WeightKind::Rolewicz: return LipschitzModel{S::Power, 1.0, 1.0, 1.0};
    case WeightKind::PolyLog: return LipschitzModel{S::Log, 0.0, 1.0, 1.0};
    case WeightKind::PowerBase: return LipschitzModel{S::LogPlusOne, 0.0, 1.0, 1.0};
    default: return std::nullopt;
  }
}

bool WeightFamily::ratio_bounded() const {
  return std::isfinite(dom_.lo) && std::isfinite(dom_.hi) && std::fabs(dom_.lo) < 1e300 && std::fabs(dom_.hi) < 1e300;
}

double log_product(const WeightFamily& w, double a, Index l, Index n) { return w.log_product(a, l, n); }

namespace {

// Increments f_{m+n}(a) - f_m(a) for m = 0..count-1.
std::vector<double> increments(const WeightFamily& w, double a, Index count, Index n) {
  std::vector<double> inc(static_cast<std::size_t>(std::max<Index>(count, 0)));
  if (count <= 0) return inc;
  if (w.has_closed_form()) {
    for (Index m = 0; m < count; ++m) inc[m] = w.log_product(a, m, n);
  } else {
    auto p = w.prefix(a, count - 1 + n);
    for (Index m = 0; m < count; ++m) inc[m] = p[m + n] - p[m];
  }
  return inc;
}

double guarded_exp(double logmag, double sign, double guard, bool& saturated) {
  if (std::fabs(logmag) > guard) {
    saturated = true;
    return std::copysign(std::exp(std::clamp(logmag, -guard, guard)), sign);
  }
  return std::copysign(std::exp(logmag), sign);
}

}  // namespace

TruncatedVector apply_backward(const WeightFamily& w, double a, const TruncatedVector& x, Index n,
                               const ShiftOptions& opt) {
  if (n < 1) fail(ErrorKind::Invalid, "shift power must be >= 1");
  TruncatedVector r;
  r.norm_tag = x.norm_tag;
  r.saturated = x.saturated;
  const Index L = static_cast<Index>(x.size());
  if (n >= L) {
    r.degenerate = true;
    return r;
  }
  const Index out = L - n;
  auto inc = increments(w, a, out, n);
  r.coeffs.assign(static_cast<std::size_t>(out), 0.0);
  for (Index m = 0; m < out; ++m) {
    double v = x.coeffs[m + n];
    if (v == 0.0) continue;
    r.coeffs[m] = guarded_exp(inc[m] + std::log(std::fabs(v)), v, opt.overflow_guard, r.saturated);
  }
  return r;
}

TruncatedVector apply_forward(const WeightFamily& w, double a, const TruncatedVector& x, Index n,
                              const ShiftOptions& opt) {
  if (n < 1) fail(ErrorKind::Invalid, "shift power must be >= 1");
  const Index L = static_cast<Index>(x.size());
  if (static_cast<std::size_t>(L + n) > opt.truncation_budget)
    fail(ErrorKind::Capacity, fmt::format("forward shift needs {} coefficients, budget is {}", L + n, opt.truncation_budget));
  TruncatedVector r;
  r.norm_tag = x.norm_tag;
  r.saturated = x.saturated;
  r.coeffs.assign(static_cast<std::size_t>(L + n), 0.0);
  auto inc = increments(w, a, L, n);
  for (Index m = 0; m < L; ++m) {
    double v = x.coeffs[m];
    if (v == 0.0) continue;
    r.coeffs[m + n] = guarded_exp(-inc[m] + std::log(std::fabs(v)), v, opt.overflow_guard, r.saturated);
  }
  return r;
}

VectorTuple product_apply(const WeightFamily& w, const ProductParam& lambda, const VectorTuple& X, Index n,
                          Direction dir, const ShiftOptions& opt) {
  if (lambda.size() != X.size() || X.empty())
    fail(ErrorKind::Invalid, fmt::format("parameter has {} coordinates but tuple has {}", lambda.size(), X.size()));
  VectorTuple out;
  out.reserve(X.size());
  for (std::size_t i = 0; i < X.size(); ++i)
    out.push_back(dir == Direction::Backward ? apply_backward(w, lambda[i], X[i], n, opt)
                                             : apply_forward(w, lambda[i], X[i], n, opt));
  return out;
}

double product_norm(const VectorTuple& X) {
  double m = 0.0;
  for (const auto& x : X) m = std::max(m, x.norm());
  return m;
}

double sup_dist(const ProductParam& a, const ProductParam& b) {
  if (a.size() != b.size()) fail(ErrorKind::Invalid, "dimension mismatch in sup_dist");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace hclab
