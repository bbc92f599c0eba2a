#pragma once

#include <cstdint>
#include <vector>

#include "hclab/seqspace.hpp"

namespace hclab {

// Sparse vector whose nonzero entries are stored as sign * exp(logmag).
// Coefficients such as exp(-a n) for n in the tens of thousands stay
// representable, so blocks S^n v never underflow to zero.
class LogSparseVector {
 public:
  struct Entry {
    Index index;
    double logmag;
    int sign;  // +1 or -1
  };

  LogSparseVector() = default;
  static LogSparseVector from_dense(const std::vector<double>& c);
  static LogSparseVector from_dense(const TruncatedVector& x) { return from_dense(x.coeffs); }

  // Adds sign*exp(logmag) at index; exact cancellation removes the entry.
  void add(Index index, double logmag, int sign);
  void add(const LogSparseVector& other);
  void scale_log(double log_factor);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }
  Index max_index() const { return entries_.empty() ? -1 : entries_.back().index; }
  Index min_index() const { return entries_.empty() ? -1 : entries_.front().index; }
  double value(Index index) const;  // exp-evaluated, may be 0/inf

  // log of the norm; -inf for the zero vector.
  double log_norm(const NormTag& tag) const;
  double norm(const NormTag& tag) const;

  // T^n with parameter a: entries below n vanish.
  LogSparseVector backward(const WeightFamily& w, double a, Index n) const;
  // S^n: forward shift with inverse weights.
  LogSparseVector forward(const WeightFamily& w, double a, Index n) const;

  TruncatedVector to_dense(Index length, NormTag tag) const;

 private:
  std::vector<Entry> entries_;  // strictly increasing index
};

using LogTuple = std::vector<LogSparseVector>;

LogTuple tuple_from_dense(const std::vector<std::vector<double>>& coords);
double tuple_norm(const LogTuple& x, const NormTag& tag);
// ||x - v|| for tuples.
double tuple_dist(const LogTuple& x, const LogTuple& v, const NormTag& tag);
LogTuple tuple_backward(const WeightFamily& w, const ProductParam& lambda, const LogTuple& x, Index n);
LogTuple tuple_forward(const WeightFamily& w, const ProductParam& lambda, const LogTuple& x, Index n);
LogTuple tuple_sum(const LogTuple& a, const LogTuple& b);
// Largest index in any coordinate (-1 if all empty).
Index tuple_max_index(const LogTuple& x);
Index tuple_support_width(const LogTuple& x);

// log(exp(a) + exp(b)) with a, b possibly -inf.
double log_add(double a, double b);

}  // namespace hclab
