#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hclab/seqspace.hpp"

namespace hclab {

// Flat list of points in R^d.
struct PointCloud {
  int d = 0;
  std::vector<double> xs;

  PointCloud() = default;
  explicit PointCloud(int dim) : d(dim) {}
  std::size_t size() const { return d == 0 ? 0 : xs.size() / static_cast<std::size_t>(d); }
  bool empty() const { return xs.empty(); }
  const double* at(std::size_t i) const { return xs.data() + i * static_cast<std::size_t>(d); }
  ProductParam point(std::size_t i) const { return ProductParam(at(i), at(i) + d); }
  void push(const double* p) { xs.insert(xs.end(), p, p + d); }
  void push(const ProductParam& p) { xs.insert(xs.end(), p.begin(), p.end()); }
};

struct Box {
  std::vector<double> lo, hi;

  bool valid() const { return !lo.empty(); }
  double sup_diam() const;
  bool contains(const double* p, double tol = 0.0) const;
  static Box of(const PointCloud& pc);
};

// Largest sup-distance between a point of box a and a point of box b.
double max_sup_dist(const Box& a, const Box& b);
// Sup-distance from p to the box (0 inside).
double sup_dist_to_box(const double* p, const Box& b);
double sup_diam(const PointCloud& pc);

// Map [0,1] -> R^d restricted to a parameter window [t_lo, t_hi] and
// reparametrized over [0,1].
struct CurveMap {
  enum class Kind { Polyline, Power, Table };
  Kind kind = Kind::Polyline;
  // Polyline: vertices at uniform parameters. Table: values at uniform
  // parameters, linearly interpolated (same evaluation, different origin).
  std::vector<std::vector<double>> points;
  // Power: origin + t^exponent * direction.
  std::vector<double> origin, direction;
  double exponent = 1.0;
  double t_lo = 0.0, t_hi = 1.0;

  int dim() const;
  ProductParam eval(double t) const;          // t in [0,1] of the window
  std::vector<double> kinks(double t0, double t1) const;  // window parameters of vertices in (t0,t1)
};

struct Similarity {
  double ratio = 0.5;
  std::vector<double> offset;  // s(x) = ratio * x + offset
};

enum class SetKind { Cube, LipschitzCurve, HolderCurve, SelfSimilar, HomogeneousCantor, CombSet };

const char* to_string(SetKind k);
SetKind parse_set_kind(const std::string& s);

struct ParamSet {
  SetKind kind = SetKind::Cube;
  int d = 1;
  std::size_t sample_budget = 1 << 16;

  // Cube, HomogeneousCantor: corner and side length.
  std::vector<double> corner;
  double width = 1.0;

  // Curves: C is the Lipschitz/Hoelder constant of the current map.
  CurveMap curve;
  double C = 1.0;
  double beta = 1.0;

  // SelfSimilar maps; HomogeneousCantor builds its own.
  std::vector<Similarity> maps;
  double rho = 0.2;  // Cantor dissection ratio
  // Placement x -> outer_scale * x + outer_offset applied after the maps.
  double outer_scale = 1.0;
  std::vector<double> outer_offset;

  // CombSet
  int depth_cap = 12;
  std::optional<Box> window;  // clip box for comb pieces

  static ParamSet cube(std::vector<double> corner, double width);
  static ParamSet lipschitz_curve(CurveMap f, double C);
  static ParamSet holder_curve(CurveMap f, double C, double beta);
  static ParamSet self_similar(std::vector<Similarity> maps);
  static ParamSet cantor(double rho, int d = 2, std::vector<double> corner = {}, double width = 1.0);
  static ParamSet comb(int depth_cap = 12);

  void validate() const;
  // Similarity maps in ambient coordinates (Cantor expands to 2^d maps).
  std::vector<Similarity> effective_maps() const;
};

struct CoverConstants {
  int r = 2;
  double gamma = 1.0;
  double C_Lambda = 1.0;
  double rho() const;  // r^{-1/gamma}
};

CoverConstants cover_constants(const ParamSet& ps);

struct Cell {
  std::vector<int> digits;  // k_1..k_m, each in 1..r
  ProductParam anchor;      // coordinate-wise max of samples
  double diam_bound = 0.0;
  PointCloud samples;
  Box box;  // bounding box of samples
  bool empty() const { return samples.empty(); }
};

struct CoverFamily {
  int r = 2;
  int m = 0;
  int d = 1;
  double C_Lambda = 1.0;
  double gamma = 1.0;
  double eta = 0.0;  // sampling resolution
  std::vector<Cell> cells;  // lexicographic order on I_r^m
  double rho() const;
};

// Grid resolution of the point sampler.
double sample_resolution(const ParamSet& ps);
PointCloud sample_points(const ParamSet& ps);
// Curve points at t0, t1, the kinks in between and `interior` uniform
// parameters inside; exact bounding boxes for polylines.
PointCloud sample_curve(const CurveMap& f, double t0, double t1, int interior);

CoverFamily build_cover(const ParamSet& ps, int m);

struct CoverCheck {
  double worst_diam_ratio = 0.0;  // max diam / bound
  double worst_nesting_excess = 0.0;
  std::size_t uncovered = 0;
  bool ok() const { return worst_diam_ratio <= 1.0 + 1e-9 && worst_nesting_excess <= 1e-12 && uncovered == 0; }
};

// Diameter, nesting (against depth m-1) and coverage on sample clouds.
CoverCheck verify_cover(const ParamSet& ps, const CoverFamily& cover);

std::int64_t box_count(const ParamSet& ps, double eps);

struct BoxDimEstimate {
  double slope = 0.0;
  double residual = 0.0;  // RMS of the fit
  std::vector<int> depths;
  std::vector<std::int64_t> counts;
};

BoxDimEstimate box_dim_estimate(const ParamSet& ps, const std::vector<int>& depths);

struct Presubdivision {
  int depth = 0;
  std::vector<ParamSet> pieces;
  double piece_C = 0.0;
};

Presubdivision presubdivide(const ParamSet& ps, double target_C);

// Spatial index over boxes for point-in-box queries.
class BoxIndex {
 public:
  BoxIndex(std::vector<Box> boxes, double tol);
  // Indices of boxes containing p (within tol), ascending.
  std::vector<std::size_t> query(const double* p) const;
  bool any(const double* p) const;
  const std::vector<Box>& boxes() const { return boxes_; }

 private:
  std::vector<Box> boxes_;
  double tol_;
  int d_ = 0;
  int bins_ = 1;
  std::vector<double> lo_, step_;
  std::vector<std::vector<std::size_t>> grid_;
  std::size_t bin_of(const double* p) const;
};

}  // namespace hclab
