#include "hclab/paramsets.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "hclab/errors.hpp"

namespace hclab {

namespace {

constexpr std::int64_t kMaxCells = std::int64_t{1} << 22;

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / b) fail(ErrorKind::Capacity, "cell count overflows 64 bits");
    r *= b;
  }
  return r;
}

unsigned gray(unsigned x) { return x ^ (x >> 1); }
unsigned gray_inverse(unsigned g) {
  unsigned x = g;
  for (unsigned s = 1; s < 32; s <<= 1) x ^= x >> s;
  return x;
}

// Lexicographic digits (0-based, most significant first) of t in base r.
std::vector<int> digits_of(std::int64_t t, int r, int m) {
  std::vector<int> dg(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    dg[i] = static_cast<int>(t % r);
    t /= r;
  }
  return dg;
}

// Dyadic cell coordinates of the cell with 0-based digits; each digit is
// the Gray code of the sub-box (bit b = upper half along axis b), which
// yields the bottom-left, bottom-right, top-right, top-left order in 2D.
std::vector<std::int64_t> dyadic_coords(const std::vector<int>& dg, int d) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(d), 0);
  for (int digit : dg) {
    unsigned g = gray(static_cast<unsigned>(digit));
    for (int b = 0; b < d; ++b) c[b] = 2 * c[b] + ((g >> b) & 1u);
  }
  return c;
}

std::int64_t index_of_dyadic(const std::vector<std::int64_t>& c, int m, int d) {
  std::int64_t t = 0;
  const std::int64_t r = std::int64_t{1} << d;
  for (int i = 0; i < m; ++i) {
    unsigned g = 0;
    for (int b = 0; b < d; ++b) g |= static_cast<unsigned>((c[b] >> (m - 1 - i)) & 1) << b;
    t = t * r + gray_inverse(g);
  }
  return t;
}

struct Affine {
  double scale = 1.0;
  std::vector<double> offset;
  void apply(const double* x, double* out, int d) const {
    for (int b = 0; b < d; ++b) out[b] = scale * x[b] + offset[b];
  }
  // this o s
  Affine compose(const Similarity& s) const {
    Affine r;
    r.scale = scale * s.ratio;
    r.offset.resize(offset.size());
    for (std::size_t b = 0; b < offset.size(); ++b) r.offset[b] = scale * s.offset[b] + offset[b];
    return r;
  }
};

Affine outer_of(const ParamSet& ps) {
  Affine a;
  a.scale = ps.outer_scale;
  a.offset = ps.outer_offset.empty() ? std::vector<double>(static_cast<std::size_t>(ps.d), 0.0) : ps.outer_offset;
  return a;
}

Box attractor_box(const std::vector<Similarity>& maps, int d) {
  double rmax = 0.0;
  for (const auto& s : maps) rmax = std::max(rmax, s.ratio);
  std::vector<double> p0(static_cast<std::size_t>(d));
  for (int b = 0; b < d; ++b) p0[b] = maps[0].offset[b] / (1.0 - maps[0].ratio);
  double R = 0.0;
  for (const auto& s : maps)
    for (int b = 0; b < d; ++b) R = std::max(R, std::fabs(s.ratio * p0[b] + s.offset[b] - p0[b]));
  R = R / (1.0 - rmax) * (1.0 + 1e-12) + 1e-300;
  Box B;
  B.lo.resize(d);
  B.hi.resize(d);
  for (int b = 0; b < d; ++b) {
    B.lo[b] = p0[b] - R;
    B.hi[b] = p0[b] + R;
  }
  // Hull iteration keeps the attractor inside and contracts to its hull box.
  for (int it = 0; it < 2000; ++it) {
    Box N;
    N.lo.assign(d, std::numeric_limits<double>::infinity());
    N.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& s : maps)
      for (int b = 0; b < d; ++b) {
        N.lo[b] = std::min(N.lo[b], s.ratio * B.lo[b] + s.offset[b]);
        N.hi[b] = std::max(N.hi[b], s.ratio * B.hi[b] + s.offset[b]);
      }
    double change = 0.0;
    for (int b = 0; b < d; ++b) change = std::max({change, std::fabs(N.lo[b] - B.lo[b]), std::fabs(N.hi[b] - B.hi[b])});
    B = N;
    if (change == 0.0) break;
  }
  return B;
}

double rho_max(const std::vector<Similarity>& maps) {
  double r = 0.0;
  for (const auto& s : maps) r = std::max(r, s.ratio);
  return r;
}

// Depth L with r^(L+1) <= budget (at least 0).
int self_similar_depth(std::size_t r, std::size_t budget) {
  int L = 0;
  double count = static_cast<double>(r);
  while (count * static_cast<double>(r) <= static_cast<double>(budget) && L < 40) {
    count *= static_cast<double>(r);
    ++L;
  }
  return L;
}

// Points s_k(p_i) for all words k of length L, p_i the fixed points.
PointCloud self_similar_points(const std::vector<Similarity>& maps, int d, int L) {
  PointCloud P(d);
  for (const auto& s : maps)
    for (int b = 0; b < d; ++b) P.xs.push_back(s.offset[b] / (1.0 - s.ratio));
  for (int l = 0; l < L; ++l) {
    PointCloud Q(d);
    Q.xs.reserve(P.xs.size() * maps.size());
    for (const auto& s : maps)
      for (std::size_t i = 0; i < P.size(); ++i)
        for (int b = 0; b < d; ++b) Q.xs.push_back(s.ratio * P.at(i)[b] + s.offset[b]);
    P = std::move(Q);
  }
  return P;
}

std::size_t lattice_side(const ParamSet& ps) {
  double g = std::floor(std::pow(static_cast<double>(ps.sample_budget), 1.0 / ps.d) + 1e-9);
  return static_cast<std::size_t>(std::max(2.0, g));
}

Box comb_window(const ParamSet& ps) {
  if (ps.window) return *ps.window;
  return Box{{1.0, 1.0}, {2.0, 2.0}};
}

}  // namespace

double Box::sup_diam() const {
  double m = 0.0;
  for (std::size_t b = 0; b < lo.size(); ++b) m = std::max(m, hi[b] - lo[b]);
  return m;
}

bool Box::contains(const double* p, double tol) const {
  for (std::size_t b = 0; b < lo.size(); ++b)
    if (p[b] < lo[b] - tol || p[b] > hi[b] + tol) return false;
  return true;
}

Box Box::of(const PointCloud& pc) {
  Box B;
  if (pc.empty()) return B;
  B.lo.assign(pc.d, std::numeric_limits<double>::infinity());
  B.hi.assign(pc.d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pc.size(); ++i)
    for (int b = 0; b < pc.d; ++b) {
      B.lo[b] = std::min(B.lo[b], pc.at(i)[b]);
      B.hi[b] = std::max(B.hi[b], pc.at(i)[b]);
    }
  return B;
}

double max_sup_dist(const Box& a, const Box& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.lo.size(); ++i) m = std::max({m, a.hi[i] - b.lo[i], b.hi[i] - a.lo[i]});
  return m;
}

double sup_dist_to_box(const double* p, const Box& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < b.lo.size(); ++i) m = std::max({m, b.lo[i] - p[i], p[i] - b.hi[i]});
  return m;
}

double sup_diam(const PointCloud& pc) { return Box::of(pc).sup_diam(); }

int CurveMap::dim() const {
  if (kind == Kind::Power) return static_cast<int>(origin.size());
  return points.empty() ? 0 : static_cast<int>(points.front().size());
}

ProductParam CurveMap::eval(double t) const {
  const double s = t_lo + (t_hi - t_lo) * t;
  if (kind == Kind::Power) {
    ProductParam p(origin);
    const double f = std::pow(std::max(s, 0.0), exponent);
    for (std::size_t b = 0; b < p.size(); ++b) p[b] += f * direction[b];
    return p;
  }
  const std::size_t K = points.size();
  double u = std::clamp(s, 0.0, 1.0) * static_cast<double>(K - 1);
  std::size_t j = std::min(static_cast<std::size_t>(u), K - 2);
  double frac = u - static_cast<double>(j);
  ProductParam p(points[j].size());
  for (std::size_t b = 0; b < p.size(); ++b) p[b] = (1.0 - frac) * points[j][b] + frac * points[j + 1][b];
  return p;
}

std::vector<double> CurveMap::kinks(double t0, double t1) const {
  std::vector<double> out;
  if (kind == Kind::Power || points.size() < 3) return out;
  const double K = static_cast<double>(points.size() - 1);
  for (std::size_t j = 1; j + 1 < points.size(); ++j) {
    double s = static_cast<double>(j) / K;
    double t = (s - t_lo) / (t_hi - t_lo);
    if (t > t0 && t < t1) out.push_back(t);
  }
  return out;
}

const char* to_string(SetKind k) {
  switch (k) {
    case SetKind::Cube: return "cube";
    case SetKind::LipschitzCurve: return "lipschitz_curve";
    case SetKind::HolderCurve: return "holder_curve";
    case SetKind::SelfSimilar: return "self_similar";
    case SetKind::HomogeneousCantor: return "cantor";
    case SetKind::CombSet: return "comb";
  }
  return "?";
}

SetKind parse_set_kind(const std::string& s) {
  for (auto k : {SetKind::Cube, SetKind::LipschitzCurve, SetKind::HolderCurve, SetKind::SelfSimilar,
                 SetKind::HomogeneousCantor, SetKind::CombSet})
    if (s == to_string(k)) return k;
  fail(ErrorKind::Invalid, "unknown parameter-set kind '" + s + "'");
}

ParamSet ParamSet::cube(std::vector<double> corner, double width) {
  ParamSet ps;
  ps.kind = SetKind::Cube;
  ps.d = static_cast<int>(corner.size());
  ps.corner = std::move(corner);
  ps.width = width;
  ps.validate();
  return ps;
}

ParamSet ParamSet::lipschitz_curve(CurveMap f, double C) {
  ParamSet ps;
  ps.kind = SetKind::LipschitzCurve;
  ps.d = f.dim();
  ps.curve = std::move(f);
  ps.C = C;
  ps.beta = 1.0;
  ps.validate();
  return ps;
}

ParamSet ParamSet::holder_curve(CurveMap f, double C, double beta) {
  ParamSet ps;
  ps.kind = SetKind::HolderCurve;
  ps.d = f.dim();
  ps.curve = std::move(f);
  ps.C = C;
  ps.beta = beta;
  ps.validate();
  return ps;
}

ParamSet ParamSet::self_similar(std::vector<Similarity> maps) {
  ParamSet ps;
  ps.kind = SetKind::SelfSimilar;
  ps.d = maps.empty() ? 0 : static_cast<int>(maps.front().offset.size());
  ps.maps = std::move(maps);
  ps.validate();
  return ps;
}

ParamSet ParamSet::cantor(double rho, int d, std::vector<double> corner, double width) {
  ParamSet ps;
  ps.kind = SetKind::HomogeneousCantor;
  ps.d = d;
  ps.rho = rho;
  ps.corner = corner.empty() ? std::vector<double>(static_cast<std::size_t>(d), 0.0) : std::move(corner);
  ps.width = width;
  ps.validate();
  return ps;
}

ParamSet ParamSet::comb(int depth_cap) {
  ParamSet ps;
  ps.kind = SetKind::CombSet;
  ps.d = 2;
  ps.depth_cap = depth_cap;
  ps.validate();
  return ps;
}

void ParamSet::validate() const {
  if (d < 1) fail(ErrorKind::Invalid, "parameter set dimension must be >= 1");
  if (sample_budget < 2) fail(ErrorKind::Invalid, "sample budget must be >= 2");
  if (!outer_offset.empty() && static_cast<int>(outer_offset.size()) != d)
    fail(ErrorKind::Invalid, "outer offset dimension mismatch");
  if (!(outer_scale > 0.0)) fail(ErrorKind::Invalid, "outer scale must be positive");
  switch (kind) {
    case SetKind::Cube:
      if (static_cast<int>(corner.size()) != d) fail(ErrorKind::Invalid, "cube corner dimension mismatch");
      if (!(width >= 0.0)) fail(ErrorKind::Invalid, "cube width must be nonnegative");
      break;
    case SetKind::LipschitzCurve:
    case SetKind::HolderCurve: {
      if (curve.dim() != d || d < 1) fail(ErrorKind::Invalid, "curve dimension mismatch");
      if (curve.kind != CurveMap::Kind::Power) {
        if (curve.points.size() < 2) fail(ErrorKind::Invalid, "curve needs at least two vertices");
        for (const auto& p : curve.points)
          if (static_cast<int>(p.size()) != d) fail(ErrorKind::Invalid, "curve vertex dimension mismatch");
      } else if (curve.direction.size() != curve.origin.size() || !(curve.exponent > 0.0)) {
        fail(ErrorKind::Invalid, "power curve needs origin, direction of equal size and a positive exponent");
      }
      if (!(curve.t_lo >= 0.0 && curve.t_hi <= 1.0 && curve.t_lo < curve.t_hi))
        fail(ErrorKind::Invalid, "curve window must satisfy 0 <= t_lo < t_hi <= 1");
      if (!(C > 0.0)) fail(ErrorKind::Invalid, "curve constant C must be positive");
      if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::Invalid, "Hoelder exponent must lie in (0,1]");
      if (kind == SetKind::LipschitzCurve && beta != 1.0) fail(ErrorKind::Invalid, "Lipschitz curve has exponent 1");
      break;
    }
    case SetKind::SelfSimilar:
      if (maps.size() < 2) fail(ErrorKind::Invalid, "self-similar set needs at least two maps");
      for (const auto& s : maps) {
        if (!(s.ratio > 0.0 && s.ratio < 1.0))
          fail(ErrorKind::Invalid, fmt::format("similarity ratio {} must lie in (0,1)", s.ratio));
        if (static_cast<int>(s.offset.size()) != d) fail(ErrorKind::Invalid, "similarity offset dimension mismatch");
      }
      break;
    case SetKind::HomogeneousCantor:
      if (!(rho > 0.0 && rho < 0.5)) fail(ErrorKind::Invalid, "Cantor dissection ratio must lie in (0,1/2)");
      if (static_cast<int>(corner.size()) != d) fail(ErrorKind::Invalid, "Cantor corner dimension mismatch");
      if (!(width > 0.0)) fail(ErrorKind::Invalid, "Cantor width must be positive");
      if (d > 16) fail(ErrorKind::Invalid, "Cantor ambient dimension too large");
      break;
    case SetKind::CombSet:
      if (d != 2) fail(ErrorKind::Invalid, "comb set lives in the plane");
      if (depth_cap < 1 || depth_cap > 24) fail(ErrorKind::Invalid, "comb depth cap must lie in 1..24");
      if (window && (window->lo.size() != 2 || window->hi.size() != 2))
        fail(ErrorKind::Invalid, "comb window must be a planar box");
      break;
  }
}

std::vector<Similarity> ParamSet::effective_maps() const {
  if (kind == SetKind::SelfSimilar) return maps;
  if (kind != SetKind::HomogeneousCantor) fail(ErrorKind::Invalid, "set has no similarity maps");
  std::vector<Similarity> out;
  const unsigned r = 1u << d;
  for (unsigned i = 0; i < r; ++i) {
    unsigned g = gray(i);
    Similarity s;
    s.ratio = rho;
    s.offset.resize(d);
    for (int b = 0; b < d; ++b) s.offset[b] = corner[b] * (1.0 - rho) + width * (1.0 - rho) * ((g >> b) & 1u);
    out.push_back(std::move(s));
  }
  return out;
}

double CoverConstants::rho() const { return std::pow(static_cast<double>(r), -1.0 / gamma); }
double CoverFamily::rho() const { return std::pow(static_cast<double>(r), -1.0 / gamma); }

CoverConstants cover_constants(const ParamSet& ps) {
  ps.validate();
  CoverConstants c;
  switch (ps.kind) {
    case SetKind::Cube:
      c.r = 1 << ps.d;
      c.gamma = ps.d;
      c.C_Lambda = ps.width;
      break;
    case SetKind::LipschitzCurve:
    case SetKind::HolderCurve:
      c.r = 2;
      c.gamma = 1.0 / ps.beta;
      c.C_Lambda = ps.C;
      break;
    case SetKind::SelfSimilar:
    case SetKind::HomogeneousCantor: {
      auto maps = ps.effective_maps();
      c.r = static_cast<int>(maps.size());
      c.gamma = 0.0;
      for (const auto& s : maps) c.gamma = std::max(c.gamma, -std::log(static_cast<double>(c.r)) / std::log(s.ratio));
      c.C_Lambda = ps.outer_scale * attractor_box(maps, ps.d).sup_diam();
      break;
    }
    case SetKind::CombSet:
      c.r = 4;
      c.gamma = 2.0;
      c.C_Lambda = comb_window(ps).sup_diam();
      break;
  }
  return c;
}

namespace {

PointCloud comb_points(const ParamSet& ps) {
  const Box W = comb_window(ps);
  PointCloud P(2);
  auto keep = [&](double x, double y) {
    double p[2] = {x, y};
    if (W.contains(p)) P.push(p);
  };
  const std::size_t H = std::max<std::size_t>(2, ps.sample_budget / 2);
  for (std::size_t i = 0; i < H; ++i) keep(1.0 + static_cast<double>(i) / static_cast<double>(H - 1), 1.0);
  std::size_t segments = (std::size_t{1} << (ps.depth_cap + 1)) - ps.depth_cap - 2;
  std::size_t per = std::max<std::size_t>(2, (ps.sample_budget / 2) / std::max<std::size_t>(segments, 1));
  for (int n = 1; n <= ps.depth_cap; ++n) {
    const double scale = std::ldexp(1.0, -n);
    for (std::int64_t k = 1; k < (std::int64_t{1} << n); ++k) {
      double x = 1.0 + static_cast<double>(k) * scale;
      for (std::size_t i = 0; i < per; ++i) keep(x, 1.0 + (static_cast<double>(i) / static_cast<double>(per - 1)) / n);
    }
  }
  return P;
}

PointCloud curve_points(const ParamSet& ps, double t0, double t1, std::size_t lattice) {
  std::vector<double> ts;
  const double K = static_cast<double>(lattice - 1);
  std::int64_t j0 = static_cast<std::int64_t>(std::ceil(t0 * K - 1e-9));
  std::int64_t j1 = static_cast<std::int64_t>(std::floor(t1 * K + 1e-9));
  ts.push_back(t0);
  for (std::int64_t j = j0; j <= j1; ++j) {
    double t = static_cast<double>(j) / K;
    if (t > t0 && t < t1) ts.push_back(t);
  }
  for (double t : ps.curve.kinks(t0, t1)) ts.push_back(t);
  ts.push_back(t1);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  PointCloud P(ps.d);
  for (double t : ts) P.push(ps.curve.eval(t));
  return P;
}

}  // namespace

PointCloud sample_curve(const CurveMap& f, double t0, double t1, int interior) {
  std::vector<double> ts{t0};
  for (int i = 1; i <= interior; ++i) ts.push_back(t0 + (t1 - t0) * i / (interior + 1));
  for (double t : f.kinks(t0, t1)) ts.push_back(t);
  ts.push_back(t1);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  PointCloud P(f.dim());
  for (double t : ts) P.push(f.eval(t));
  return P;
}

double sample_resolution(const ParamSet& ps) {
  ps.validate();
  switch (ps.kind) {
    case SetKind::Cube: return ps.width / static_cast<double>(lattice_side(ps) - 1);
    case SetKind::LipschitzCurve:
    case SetKind::HolderCurve: return ps.C * std::pow(1.0 / static_cast<double>(ps.sample_budget - 1), ps.beta);
    case SetKind::SelfSimilar:
    case SetKind::HomogeneousCantor: {
      auto maps = ps.effective_maps();
      int L = self_similar_depth(maps.size(), ps.sample_budget);
      return cover_constants(ps).C_Lambda * std::pow(rho_max(maps), L);
    }
    case SetKind::CombSet: {
      std::size_t segments = (std::size_t{1} << (ps.depth_cap + 1)) - ps.depth_cap - 2;
      std::size_t per = std::max<std::size_t>(2, (ps.sample_budget / 2) / std::max<std::size_t>(segments, 1));
      std::size_t H = std::max<std::size_t>(2, ps.sample_budget / 2);
      return std::max(1.0 / static_cast<double>(H - 1), 1.0 / static_cast<double>(per - 1));
    }
  }
  return 0.0;
}

PointCloud sample_points(const ParamSet& ps) {
  ps.validate();
  switch (ps.kind) {
    case SetKind::Cube: {
      const std::size_t G = lattice_side(ps);
      PointCloud P(ps.d);
      std::vector<std::size_t> idx(ps.d, 0);
      std::vector<double> p(ps.d);
      for (;;) {
        for (int b = 0; b < ps.d; ++b)
          p[b] = ps.corner[b] + ps.width * static_cast<double>(idx[b]) / static_cast<double>(G - 1);
        P.push(p);
        int b = 0;
        while (b < ps.d && ++idx[b] == G) idx[b++] = 0;
        if (b == ps.d) break;
      }
      return P;
    }
    case SetKind::LipschitzCurve:
    case SetKind::HolderCurve: return curve_points(ps, 0.0, 1.0, ps.sample_budget);
    case SetKind::SelfSimilar:
    case SetKind::HomogeneousCantor: {
      auto maps = ps.effective_maps();
      int L = self_similar_depth(maps.size(), ps.sample_budget);
      PointCloud raw = self_similar_points(maps, ps.d, L);
      Affine outer = outer_of(ps);
      PointCloud P(ps.d);
      P.xs.resize(raw.xs.size());
      for (std::size_t i = 0; i < raw.size(); ++i) outer.apply(raw.at(i), P.xs.data() + i * ps.d, ps.d);
      return P;
    }
    case SetKind::CombSet: return comb_points(ps);
  }
  return PointCloud(ps.d);
}

namespace {

void finish_cell(Cell& c) {
  c.box = Box::of(c.samples);
  if (c.box.valid()) c.anchor = c.box.hi;
}

// Assigns lattice points (coordinates in [lo, lo + side]) to closed dyadic
// cells at depth m.
void assign_to_dyadic(const PointCloud& pts, const std::vector<double>& lo, double side, int m,
                      std::vector<Cell>& cells) {
  const int d = pts.d;
  const std::int64_t n = std::int64_t{1} << m;
  const double cell = side / static_cast<double>(n);
  std::vector<std::vector<std::int64_t>> cand(d);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double* p = pts.at(i);
    bool inside = true;
    for (int b = 0; b < d && inside; ++b) {
      cand[b].clear();
      double u = (p[b] - lo[b]) / cell;
      if (u < -1e-9 || u > static_cast<double>(n) + 1e-9) {
        inside = false;
        break;
      }
      std::int64_t f = static_cast<std::int64_t>(std::floor(u));
      for (std::int64_t c : {f - 1, f, f + 1}) {
        if (c < 0 || c >= n) continue;
        double a = static_cast<double>(c) * cell + lo[b], z = static_cast<double>(c + 1) * cell + lo[b];
        if (p[b] >= a - 1e-12 * side && p[b] <= z + 1e-12 * side) cand[b].push_back(c);
      }
      if (cand[b].empty()) inside = false;
    }
    if (!inside) continue;
    std::vector<std::size_t> pick(d, 0);
    std::vector<std::int64_t> coords(d);
    for (;;) {
      for (int b = 0; b < d; ++b) coords[b] = cand[b][pick[b]];
      cells[static_cast<std::size_t>(index_of_dyadic(coords, m, d))].samples.push(p);
      int b = 0;
      while (b < d && ++pick[b] == cand[b].size()) pick[b++] = 0;
      if (b == d) break;
    }
  }
}

}  // namespace

CoverFamily build_cover(const ParamSet& ps, int m) {
  ps.validate();
  if (m < 0) fail(ErrorKind::Invalid, "cover depth must be >= 0");
  CoverConstants cc = cover_constants(ps);
  CoverFamily cf;
  cf.r = cc.r;
  cf.m = m;
  cf.d = ps.d;
  cf.C_Lambda = cc.C_Lambda;
  cf.gamma = cc.gamma;
  cf.eta = sample_resolution(ps);
  const std::int64_t q = ipow(cc.r, m);
  if (q > kMaxCells) fail(ErrorKind::Capacity, fmt::format("cover with {} cells exceeds the cap {}", q, kMaxCells));
  const double bound = cc.C_Lambda * std::pow(cc.rho(), m);
  cf.cells.resize(static_cast<std::size_t>(q));
  for (std::int64_t t = 0; t < q; ++t) {
    Cell& c = cf.cells[static_cast<std::size_t>(t)];
    auto dg = digits_of(t, cc.r, m);
    c.digits.resize(dg.size());
    for (std::size_t i = 0; i < dg.size(); ++i) c.digits[i] = dg[i] + 1;
    c.diam_bound = bound;
    c.samples = PointCloud(ps.d);
  }

  switch (ps.kind) {
    case SetKind::Cube: {
      assign_to_dyadic(sample_points(ps), ps.corner, ps.width, m, cf.cells);
      const double side = ps.width / static_cast<double>(std::int64_t{1} << m);
      for (std::int64_t t = 0; t < q; ++t) {
        Cell& c = cf.cells[static_cast<std::size_t>(t)];
        auto co = dyadic_coords(digits_of(t, cc.r, m), ps.d);
        std::vector<double> p(ps.d);
        for (unsigned mask = 0; mask < (1u << ps.d); ++mask) {
          for (int b = 0; b < ps.d; ++b)
            p[b] = ps.corner[b] + side * static_cast<double>(co[b] + ((mask >> b) & 1u));
          c.samples.push(p);
        }
        finish_cell(c);
      }
      break;
    }
    case SetKind::LipschitzCurve:
    case SetKind::HolderCurve: {
      const double len = std::ldexp(1.0, -m);
      for (std::int64_t t = 0; t < q; ++t) {
        Cell& c = cf.cells[static_cast<std::size_t>(t)];
        double a = static_cast<double>(t) * len;
        c.samples = curve_points(ps, a, std::min(1.0, a + len), ps.sample_budget);
        finish_cell(c);
      }
      break;
    }
    case SetKind::SelfSimilar:
    case SetKind::HomogeneousCantor: {
      auto maps = ps.effective_maps();
      const std::size_t per = std::max<std::size_t>(maps.size(), ps.sample_budget / static_cast<std::size_t>(q));
      PointCloud base = self_similar_points(maps, ps.d, self_similar_depth(maps.size(), per));
      Affine outer = outer_of(ps);
      std::vector<double> tmp(ps.d);
      for (std::int64_t t = 0; t < q; ++t) {
        Cell& c = cf.cells[static_cast<std::size_t>(t)];
        Affine A = outer;
        for (int k : c.digits) A = A.compose(maps[k - 1]);
        c.samples.xs.resize(base.xs.size());
        for (std::size_t i = 0; i < base.size(); ++i) A.apply(base.at(i), c.samples.xs.data() + i * ps.d, ps.d);
        finish_cell(c);
      }
      break;
    }
    case SetKind::CombSet: {
      const Box W = comb_window(ps);
      assign_to_dyadic(sample_points(ps), W.lo, W.sup_diam(), m, cf.cells);
      for (auto& c : cf.cells) finish_cell(c);
      break;
    }
  }
  return cf;
}

CoverCheck verify_cover(const ParamSet& ps, const CoverFamily& cover) {
  CoverCheck chk;
  for (const auto& c : cover.cells) {
    if (c.empty()) continue;
    double ratio = c.box.sup_diam() / c.diam_bound;
    chk.worst_diam_ratio = std::max(chk.worst_diam_ratio, ratio);
  }
  if (cover.m >= 1) {
    CoverFamily parent = build_cover(ps, cover.m - 1);
    for (std::size_t t = 0; t < cover.cells.size(); ++t) {
      const Cell& c = cover.cells[t];
      const Cell& p = parent.cells[t / static_cast<std::size_t>(cover.r)];
      if (c.empty()) continue;
      if (p.empty()) {
        chk.worst_nesting_excess = std::numeric_limits<double>::infinity();
        continue;
      }
      for (std::size_t i = 0; i < c.samples.size(); ++i)
        chk.worst_nesting_excess =
            std::max(chk.worst_nesting_excess, sup_dist_to_box(c.samples.at(i), p.box) - cover.eta);
    }
    chk.worst_nesting_excess = std::max(0.0, chk.worst_nesting_excess);
  }
  std::vector<Box> boxes;
  for (const auto& c : cover.cells)
    if (!c.empty()) boxes.push_back(c.box);
  if (boxes.empty()) return chk;
  BoxIndex index(std::move(boxes), cover.eta);
  PointCloud all = sample_points(ps);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (!index.any(all.at(i))) ++chk.uncovered;
  return chk;
}

namespace {

bool is_dyadic(double eps, int& m) {
  int e = 0;
  double f = std::frexp(eps, &e);  // eps = f 2^e, f in [0.5,1)
  if (f != 0.5) return false;
  m = 1 - e;
  return true;
}

std::int64_t comb_count_dyadic(int m, int cap) {
  // Columns 2^m .. 2^{m+1}-1 all meet the base segment at row 2^m; a tooth
  // at height 1/n adds rows up to 2^m + ceil(2^m/n) - 1 in its column.
  const std::int64_t W = std::int64_t{1} << m;
  std::vector<std::int64_t> height(static_cast<std::size_t>(W), 1);
  for (int n = 1; n <= cap; ++n) {
    const std::int64_t h = (W + n - 1) / n;
    for (std::int64_t k = 1; k < (std::int64_t{1} << n); ++k) {
      std::int64_t col;
      if (n <= m) {
        col = (k << (m - n)) - 1;
      } else {
        std::int64_t q = k >> (n - m), rem = k & ((std::int64_t{1} << (n - m)) - 1);
        col = q - (rem == 0 ? 1 : 0);
      }
      height[static_cast<std::size_t>(col)] = std::max(height[static_cast<std::size_t>(col)], h);
    }
  }
  return std::accumulate(height.begin(), height.end(), std::int64_t{0});
}

}  // namespace

std::int64_t box_count(const ParamSet& ps, double eps) {
  ps.validate();
  if (!(eps > 0.0)) fail(ErrorKind::Invalid, "box size must be positive");
  int m = 0;
  if (ps.kind == SetKind::Cube) {
    std::int64_t n = 1;
    for (int b = 0; b < ps.d; ++b) {
      double lo = ps.corner[b], hi = ps.corner[b] + ps.width;
      std::int64_t first = static_cast<std::int64_t>(std::floor(lo / eps));
      std::int64_t last = std::max(first, static_cast<std::int64_t>(std::ceil(hi / eps)) - 1);
      n *= last - first + 1;
    }
    return n;
  }
  if (ps.kind == SetKind::CombSet && !ps.window && is_dyadic(eps, m) && m >= 0 && m <= 26)
    return comb_count_dyadic(m, ps.depth_cap);
  double eta = sample_resolution(ps);
  if (eps <= eta) fail(ErrorKind::Resolution, fmt::format("box size {} is not above the sampling resolution {}", eps, eta));
  PointCloud P = sample_points(ps);
  Box B = Box::of(P);
  std::vector<std::int64_t> floor_lo(ps.d);
  for (int b = 0; b < ps.d; ++b) floor_lo[b] = static_cast<std::int64_t>(std::floor(B.lo[b] / eps));
  std::vector<std::vector<std::int64_t>> keys;
  keys.reserve(P.size());
  for (std::size_t i = 0; i < P.size(); ++i) {
    std::vector<std::int64_t> k(ps.d);
    for (int b = 0; b < ps.d; ++b)
      k[b] = std::max(static_cast<std::int64_t>(std::ceil(P.at(i)[b] / eps)) - 1, floor_lo[b]);
    keys.push_back(std::move(k));
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::int64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

BoxDimEstimate box_dim_estimate(const ParamSet& ps, const std::vector<int>& depths) {
  if (depths.size() < 3) fail(ErrorKind::InsufficientData, "box dimension fit needs at least three depths");
  BoxDimEstimate e;
  e.depths = depths;
  std::vector<double> x, y;
  for (int m : depths) {
    std::int64_t n = box_count(ps, std::ldexp(1.0, -m));
    e.counts.push_back(n);
    x.push_back(m * std::log(2.0));
    y.push_back(std::log(static_cast<double>(n)));
  }
  const double k = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / k, my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  e.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (my + e.slope * (x[i] - mx));
    ss += r * r;
  }
  e.residual = std::sqrt(ss / k);
  return e;
}

Presubdivision presubdivide(const ParamSet& ps, double target_C) {
  ps.validate();
  if (!(target_C > 0.0)) fail(ErrorKind::Invalid, "target constant must be positive");
  CoverConstants cc = cover_constants(ps);
  Presubdivision out;
  int m = 0;
  while (cc.C_Lambda * std::pow(cc.rho(), m) > target_C * (1.0 + 1e-12)) ++m;
  out.depth = m;
  out.piece_C = cc.C_Lambda * std::pow(cc.rho(), m);
  const std::int64_t q = ipow(cc.r, m);
  if (q > kMaxCells) fail(ErrorKind::Capacity, fmt::format("pre-subdivision into {} pieces exceeds the cap", q));
  for (std::int64_t t = 0; t < q; ++t) {
    auto dg = digits_of(t, cc.r, m);
    ParamSet p = ps;
    switch (ps.kind) {
      case SetKind::Cube: {
        auto co = dyadic_coords(dg, ps.d);
        p.width = ps.width / static_cast<double>(std::int64_t{1} << m);
        for (int b = 0; b < ps.d; ++b) p.corner[b] = ps.corner[b] + p.width * static_cast<double>(co[b]);
        break;
      }
      case SetKind::LipschitzCurve:
      case SetKind::HolderCurve: {
        const double len = ps.curve.t_hi - ps.curve.t_lo, step = std::ldexp(1.0, -m);
        p.curve.t_lo = ps.curve.t_lo + len * static_cast<double>(t) * step;
        p.curve.t_hi = t + 1 == q ? ps.curve.t_hi : ps.curve.t_lo + len * static_cast<double>(t + 1) * step;
        p.C = ps.C * std::pow(step, ps.beta);
        break;
      }
      case SetKind::SelfSimilar:
      case SetKind::HomogeneousCantor: {
        auto maps = ps.effective_maps();
        Affine A = outer_of(ps);
        for (int k : dg) A = A.compose(maps[k]);
        p.outer_scale = A.scale;
        p.outer_offset = A.offset;
        break;
      }
      case SetKind::CombSet: {
        Box W = comb_window(ps);
        auto co = dyadic_coords(dg, 2);
        double side = W.sup_diam() / static_cast<double>(std::int64_t{1} << m);
        Box w2;
        for (int b = 0; b < 2; ++b) {
          w2.lo.push_back(W.lo[b] + side * static_cast<double>(co[b]));
          w2.hi.push_back(w2.lo.back() + side);
        }
        p.window = w2;
        break;
      }
    }
    out.pieces.push_back(std::move(p));
  }
  return out;
}

BoxIndex::BoxIndex(std::vector<Box> boxes, double tol) : boxes_(std::move(boxes)), tol_(tol) {
  if (boxes_.empty()) return;
  d_ = static_cast<int>(boxes_.front().lo.size());
  std::vector<double> lo(d_, std::numeric_limits<double>::infinity()), hi(d_, -std::numeric_limits<double>::infinity());
  for (const auto& b : boxes_)
    for (int i = 0; i < d_; ++i) {
      lo[i] = std::min(lo[i], b.lo[i] - tol_);
      hi[i] = std::max(hi[i], b.hi[i] + tol_);
    }
  double per_axis = std::pow(static_cast<double>(boxes_.size()), 1.0 / d_);
  bins_ = static_cast<int>(std::clamp(std::ceil(per_axis), 1.0, std::floor(std::pow(4.0e6, 1.0 / d_))));
  lo_ = lo;
  step_.resize(d_);
  for (int i = 0; i < d_; ++i) step_[i] = std::max((hi[i] - lo[i]) / bins_, 1e-300);
  std::size_t total = 1;
  for (int i = 0; i < d_; ++i) total *= static_cast<std::size_t>(bins_);
  grid_.resize(total);
  std::vector<int> a(d_), z(d_), cur(d_);
  for (std::size_t k = 0; k < boxes_.size(); ++k) {
    for (int i = 0; i < d_; ++i) {
      a[i] = std::clamp(static_cast<int>(std::floor((boxes_[k].lo[i] - tol_ - lo_[i]) / step_[i])), 0, bins_ - 1);
      z[i] = std::clamp(static_cast<int>(std::floor((boxes_[k].hi[i] + tol_ - lo_[i]) / step_[i])), 0, bins_ - 1);
      cur[i] = a[i];
    }
    for (;;) {
      std::size_t flat = 0;
      for (int i = d_ - 1; i >= 0; --i) flat = flat * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(cur[i]);
      grid_[flat].push_back(k);
      int i = 0;
      while (i < d_ && ++cur[i] > z[i]) {
        cur[i] = a[i];
        ++i;
      }
      if (i == d_) break;
    }
  }
}

std::size_t BoxIndex::bin_of(const double* p) const {
  std::size_t flat = 0;
  for (int i = d_ - 1; i >= 0; --i) {
    int c = std::clamp(static_cast<int>(std::floor((p[i] - lo_[i]) / step_[i])), 0, bins_ - 1);
    flat = flat * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(c);
  }
  return flat;
}

std::vector<std::size_t> BoxIndex::query(const double* p) const {
  std::vector<std::size_t> out;
  if (boxes_.empty()) return out;
  for (std::size_t k : grid_[bin_of(p)])
    if (boxes_[k].contains(p, tol_)) out.push_back(k);
  return out;
}

bool BoxIndex::any(const double* p) const {
  if (boxes_.empty()) return false;
  for (std::size_t k : grid_[bin_of(p)])
    if (boxes_[k].contains(p, tol_)) return true;
  return false;
}

}  // namespace hclab
