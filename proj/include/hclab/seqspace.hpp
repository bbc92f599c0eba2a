#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hclab {

using Index = std::int64_t;

struct NormTag {
  enum class Kind { Ellp, Sup };
  Kind kind = Kind::Sup;
  double p = 2.0;  // used only for Ellp; p >= 1

  static NormTag sup() { return {Kind::Sup, 0.0}; }
  static NormTag ellp(double p);
  bool operator==(const NormTag&) const = default;
};

std::string to_string(const NormTag& t);
NormTag parse_norm_tag(const std::string& s);  // "sup", "c0", "l1", "l2.5"

// Finitely supported real sequence x_0..x_{L-1}.
struct TruncatedVector {
  std::vector<double> coeffs;
  NormTag norm_tag = NormTag::sup();
  bool degenerate = false;  // shift ran past the truncation
  bool saturated = false;   // some |log coefficient| exceeded the guard

  TruncatedVector() = default;
  TruncatedVector(std::vector<double> c, NormTag tag);
  static TruncatedVector zeros(std::size_t L, NormTag tag = NormTag::sup());
  static TruncatedVector basis(std::size_t L, std::size_t i, NormTag tag = NormTag::sup());

  std::size_t size() const { return coeffs.size(); }
  double norm() const;
};

TruncatedVector operator+(const TruncatedVector& a, const TruncatedVector& b);
TruncatedVector operator*(double s, const TruncatedVector& a);

struct Interval {
  double lo = -1e300;
  double hi = 1e300;
  bool contains(double a) const { return a >= lo && a <= hi; }
};

enum class WeightKind {
  ExpPower,      // f_n(a) = a n^alpha
  OnePlusPower,  // w_n(a) = 1 + a / n^{1-alpha}
  Rolewicz,      // f_n(a) = a n
  PolyLog,       // f_n(a) = n^alpha log(base) + a log n
  OnePlusOverN,  // w_n(a) = 1 + a/n
  PowerBase,     // w_n(a) = (1 + 1/n)^a, f_n(a) = a log(n+1)
  Tabulated,     // log w_j(a) tabulated on a-nodes, linear in a between nodes
};

const char* to_string(WeightKind k);
WeightKind parse_weight_kind(const std::string& s);

// Scale function F with c F(n)|a-b| <= |f_n(a)-f_n(b)| <= C F(n)|a-b|.
struct LipschitzModel {
  enum class Scale { Power, Log, LogPlusOne };
  Scale scale = Scale::Power;
  double alpha = 1.0;  // exponent when scale == Power
  double c_lower = 1.0;
  double c_upper = 1.0;
  double F(Index n) const;
};

class WeightFamily {
 public:
  static WeightFamily exp_power(double alpha, Interval dom);
  static WeightFamily one_plus_power(double alpha, Interval dom);
  static WeightFamily rolewicz(Interval dom);
  static WeightFamily poly_log(Interval dom, double base = 2.0, double alpha = 1.0);
  static WeightFamily one_plus_over_n(Interval dom);
  static WeightFamily power_base(Interval dom);
  // Tabulates log w_j(a) for j = 1..n_max at each node of a_nodes.
  static WeightFamily tabulate(const WeightFamily& src, std::vector<double> a_nodes, Index n_max);
  // Raw table: rows[i][j-1] = log w_j(a_nodes[i]).
  static WeightFamily tabulated(std::vector<double> a_nodes, std::vector<std::vector<double>> rows,
                                Interval dom);

  WeightKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double base() const { return base_; }
  const Interval& domain() const { return dom_; }
  Index table_size() const;
  const std::vector<double>& a_nodes() const { return nodes_; }
  const std::vector<std::vector<double>>& table_rows() const { return rows_; }

  // log w_j(a), j >= 1.
  double log_weight(Index j, double a) const;
  // f_{l+n}(a) - f_l(a). Throws Domain / Range.
  double log_product(double a, Index l, Index n) const;
  // f_n(a).
  double f(double a, Index n) const { return n == 0 ? 0.0 : log_product(a, 0, n); }
  // f_0..f_upto; used by shifts of long vectors.
  std::vector<double> prefix(double a, Index upto) const;

  bool has_closed_form() const;
  std::optional<LipschitzModel> lipschitz_model() const;
  // w_n(a)/w_n(b) bounded below on bounded domains; recorded, not enforced.
  bool ratio_bounded() const;

 private:
  void check_domain(double a) const;
  WeightKind kind_ = WeightKind::Rolewicz;
  double alpha_ = 1.0;
  double base_ = 2.0;
  Interval dom_;
  std::vector<double> nodes_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<long double>> prefix_;  // prefix_[i][j] = sum_{t<=j} rows_[i][t-1]
};

// Free-function form.
double log_product(const WeightFamily& w, double a, Index l, Index n);

struct ShiftOptions {
  double overflow_guard = 700.0;
  std::size_t truncation_budget = 10'000'000;
};

// (B^n x)_m = exp(f_{m+n}(a) - f_m(a)) x_{m+n}; length L-n.
TruncatedVector apply_backward(const WeightFamily& w, double a, const TruncatedVector& x, Index n,
                               const ShiftOptions& opt = {});
// (S^n x)_{m+n} = exp(-(f_{m+n}(a) - f_m(a))) x_m; length L+n.
TruncatedVector apply_forward(const WeightFamily& w, double a, const TruncatedVector& x, Index n,
                              const ShiftOptions& opt = {});

using ProductParam = std::vector<double>;
using VectorTuple = std::vector<TruncatedVector>;

enum class Direction { Backward, Forward };

VectorTuple product_apply(const WeightFamily& w, const ProductParam& lambda, const VectorTuple& X,
                          Index n, Direction dir, const ShiftOptions& opt = {});
double product_norm(const VectorTuple& X);

// Sup-norm distance on R^d.
double sup_dist(const ProductParam& a, const ProductParam& b);

}  // namespace hclab
