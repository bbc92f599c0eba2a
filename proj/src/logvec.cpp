#include "hclab/logvec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hclab/errors.hpp"

namespace hclab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

LogSparseVector LogSparseVector::from_dense(const std::vector<double>& c) {
  LogSparseVector v;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    if (!std::isfinite(c[i])) fail(ErrorKind::Invalid, "coefficients must be finite");
    v.entries_.push_back({static_cast<Index>(i), std::log(std::fabs(c[i])), c[i] > 0 ? 1 : -1});
  }
  return v;
}

void LogSparseVector::add(Index index, double logmag, int sign) {
  if (logmag == kNegInf) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, Index i) { return e.index < i; });
  if (it == entries_.end() || it->index != index) {
    entries_.insert(it, Entry{index, logmag, sign >= 0 ? 1 : -1});
    return;
  }
  const int s = sign >= 0 ? 1 : -1;
  if (it->sign == s) {
    it->logmag = log_add(it->logmag, logmag);
    return;
  }
  double hi = std::max(it->logmag, logmag), lo = std::min(it->logmag, logmag);
  if (hi == lo) {
    entries_.erase(it);
    return;
  }
  if (logmag > it->logmag) it->sign = s;
  it->logmag = hi + std::log1p(-std::exp(lo - hi));
}

void LogSparseVector::add(const LogSparseVector& other) {
  for (const auto& e : other.entries_) add(e.index, e.logmag, e.sign);
}

void LogSparseVector::scale_log(double log_factor) {
  for (auto& e : entries_) e.logmag += log_factor;
}

double LogSparseVector::value(Index index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, Index i) { return e.index < i; });
  if (it == entries_.end() || it->index != index) return 0.0;
  return it->sign * std::exp(it->logmag);
}

double LogSparseVector::log_norm(const NormTag& tag) const {
  if (entries_.empty()) return kNegInf;
  double mx = kNegInf;
  for (const auto& e : entries_) mx = std::max(mx, e.logmag);
  if (tag.kind == NormTag::Kind::Sup) return mx;
  double s = 0.0;
  for (const auto& e : entries_) s += std::exp(tag.p * (e.logmag - mx));
  return mx + std::log(s) / tag.p;
}

double LogSparseVector::norm(const NormTag& tag) const {
  double l = log_norm(tag);
  return l == kNegInf ? 0.0 : std::exp(l);
}

LogSparseVector LogSparseVector::backward(const WeightFamily& w, double a, Index n) const {
  LogSparseVector r;
  for (const auto& e : entries_) {
    if (e.index < n) continue;
    Index m = e.index - n;
    r.entries_.push_back({m, e.logmag + w.log_product(a, m, n), e.sign});
  }
  return r;
}

LogSparseVector LogSparseVector::forward(const WeightFamily& w, double a, Index n) const {
  LogSparseVector r;
  r.entries_.reserve(entries_.size());
  for (const auto& e : entries_) r.entries_.push_back({e.index + n, e.logmag - w.log_product(a, e.index, n), e.sign});
  return r;
}

TruncatedVector LogSparseVector::to_dense(Index length, NormTag tag) const {
  auto v = TruncatedVector::zeros(static_cast<std::size_t>(length), tag);
  for (const auto& e : entries_) {
    if (e.index >= length) fail(ErrorKind::Range, "sparse entry beyond dense length");
    v.coeffs[e.index] = e.sign * std::exp(e.logmag);
  }
  return v;
}

LogTuple tuple_from_dense(const std::vector<std::vector<double>>& coords) {
  LogTuple t;
  for (const auto& c : coords) t.push_back(LogSparseVector::from_dense(c));
  return t;
}

double tuple_norm(const LogTuple& x, const NormTag& tag) {
  double m = 0.0;
  for (const auto& c : x) m = std::max(m, c.norm(tag));
  return m;
}

LogTuple tuple_sum(const LogTuple& a, const LogTuple& b) {
  if (a.size() != b.size()) fail(ErrorKind::Invalid, "tuple dimension mismatch");
  LogTuple r = a;
  for (std::size_t i = 0; i < a.size(); ++i) r[i].add(b[i]);
  return r;
}

double tuple_dist(const LogTuple& x, const LogTuple& v, const NormTag& tag) {
  if (x.size() != v.size()) fail(ErrorKind::Invalid, "tuple dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    LogSparseVector d = x[i];
    for (const auto& e : v[i].entries()) d.add(e.index, e.logmag, -e.sign);
    m = std::max(m, d.norm(tag));
  }
  return m;
}

LogTuple tuple_backward(const WeightFamily& w, const ProductParam& lambda, const LogTuple& x, Index n) {
  if (lambda.size() != x.size()) fail(ErrorKind::Invalid, "parameter/tuple dimension mismatch");
  LogTuple r;
  r.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r.push_back(x[i].backward(w, lambda[i], n));
  return r;
}

LogTuple tuple_forward(const WeightFamily& w, const ProductParam& lambda, const LogTuple& x, Index n) {
  if (lambda.size() != x.size()) fail(ErrorKind::Invalid, "parameter/tuple dimension mismatch");
  LogTuple r;
  r.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r.push_back(x[i].forward(w, lambda[i], n));
  return r;
}

Index tuple_max_index(const LogTuple& x) {
  Index m = -1;
  for (const auto& c : x) m = std::max(m, c.max_index());
  return m;
}

Index tuple_support_width(const LogTuple& x) { return tuple_max_index(x) + 1; }

}  // namespace hclab
