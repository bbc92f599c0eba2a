#include "hclab/serialize.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <sstream>

#include "hclab/errors.hpp"

namespace hclab {

namespace {

std::vector<double> doubles(const json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::Config, where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_from(j[i], fmt::format("{}[{}]", where, i)));
  return out;
}

json doubles_json(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

template <class T>
T integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(ErrorKind::Config, where + " must be an integer");
  return j.get<T>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) fail(ErrorKind::Config, where + " must be a string");
  return j.get<std::string>();
}

// Library parse errors inside config parsing are configuration errors.
template <class F>
auto as_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Invalid || e.kind() == ErrorKind::Domain) fail(ErrorKind::Config, e.what());
    throw;
  }
}

Interval interval_from(const json& j, const std::string& where) {
  auto v = doubles(j, where);
  if (v.size() != 2 || !(v[0] <= v[1])) fail(ErrorKind::Config, where + " must be [lo, hi] with lo <= hi");
  return {v[0], v[1]};
}

}  // namespace

void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::Config, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(ErrorKind::Config, fmt::format("unknown key '{}' in {}", it.key(), where));
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::Config, fmt::format("missing key '{}' in {}", key, where));
  return *it;
}

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorKind::Config, where + " must be a number");
}

std::string fmt_double(double x) { return fmt::format("{:.17g}", x); }

json to_json(const WeightFamily& w) {
  json j;
  j["kind"] = to_string(w.kind());
  j["domain"] = doubles_json({w.domain().lo, w.domain().hi});
  switch (w.kind()) {
    case WeightKind::ExpPower:
    case WeightKind::OnePlusPower: j["alpha"] = w.alpha(); break;
    case WeightKind::PolyLog:
      j["alpha"] = w.alpha();
      j["base"] = w.base();
      break;
    case WeightKind::Tabulated: {
      j["a_nodes"] = doubles_json(w.a_nodes());
      json rows = json::array();
      for (const auto& r : w.table_rows()) rows.push_back(doubles_json(r));
      j["rows"] = rows;
      break;
    }
    default: break;
  }
  return j;
}

WeightFamily weight_from_json(const json& j) {
  const std::string where = "weights";
  expect_keys(j, {"kind", "domain", "alpha", "base", "a_nodes", "rows", "source", "n_max"}, where);
  return as_config([&] {
    const WeightKind k = parse_weight_kind(text(require(j, "kind", where), where + ".kind"));
    Interval dom = j.contains("domain") ? interval_from(j["domain"], where + ".domain") : Interval{};
    auto alpha = [&] { return number_from(require(j, "alpha", where), where + ".alpha"); };
    switch (k) {
      case WeightKind::ExpPower: return WeightFamily::exp_power(alpha(), dom);
      case WeightKind::OnePlusPower: return WeightFamily::one_plus_power(alpha(), dom);
      case WeightKind::Rolewicz: return WeightFamily::rolewicz(dom);
      case WeightKind::PolyLog:
        return WeightFamily::poly_log(dom, j.contains("base") ? number_from(j["base"], where + ".base") : 2.0,
                                      j.contains("alpha") ? alpha() : 1.0);
      case WeightKind::OnePlusOverN: return WeightFamily::one_plus_over_n(dom);
      case WeightKind::PowerBase: return WeightFamily::power_base(dom);
      case WeightKind::Tabulated: {
        auto nodes = doubles(require(j, "a_nodes", where), where + ".a_nodes");
        if (j.contains("source"))
          return WeightFamily::tabulate(weight_from_json(j["source"]), nodes,
                                        integer<Index>(require(j, "n_max", where), where + ".n_max"));
        const json& rows = require(j, "rows", where);
        if (!rows.is_array()) fail(ErrorKind::Config, where + ".rows must be an array");
        std::vector<std::vector<double>> r;
        for (std::size_t i = 0; i < rows.size(); ++i) r.push_back(doubles(rows[i], fmt::format("{}.rows[{}]", where, i)));
        return WeightFamily::tabulated(nodes, r, dom);
      }
    }
    fail(ErrorKind::Config, "unsupported weight kind");
  });
}

json to_json(const CurveMap& f) {
  json j;
  switch (f.kind) {
    case CurveMap::Kind::Polyline:
    case CurveMap::Kind::Table: {
      j["type"] = f.kind == CurveMap::Kind::Polyline ? "polyline" : "table";
      json pts = json::array();
      for (const auto& p : f.points) pts.push_back(doubles_json(p));
      j["points"] = pts;
      break;
    }
    case CurveMap::Kind::Power:
      j["type"] = "power";
      j["origin"] = doubles_json(f.origin);
      j["direction"] = doubles_json(f.direction);
      j["exponent"] = f.exponent;
      break;
  }
  j["t_lo"] = f.t_lo;
  j["t_hi"] = f.t_hi;
  return j;
}

CurveMap curve_from_json(const json& j) {
  const std::string where = "lambda.curve";
  expect_keys(j, {"type", "points", "origin", "direction", "exponent", "t_lo", "t_hi"}, where);
  CurveMap f;
  const std::string type = text(require(j, "type", where), where + ".type");
  if (type == "polyline" || type == "table") {
    f.kind = type == "polyline" ? CurveMap::Kind::Polyline : CurveMap::Kind::Table;
    const json& pts = require(j, "points", where);
    if (!pts.is_array()) fail(ErrorKind::Config, where + ".points must be an array");
    for (std::size_t i = 0; i < pts.size(); ++i) f.points.push_back(doubles(pts[i], fmt::format("{}.points[{}]", where, i)));
  } else if (type == "power") {
    f.kind = CurveMap::Kind::Power;
    f.origin = doubles(require(j, "origin", where), where + ".origin");
    f.direction = doubles(require(j, "direction", where), where + ".direction");
    f.exponent = number_from(require(j, "exponent", where), where + ".exponent");
  } else {
    fail(ErrorKind::Config, fmt::format("unknown curve type '{}' in {}", type, where));
  }
  if (j.contains("t_lo")) f.t_lo = number_from(j["t_lo"], where + ".t_lo");
  if (j.contains("t_hi")) f.t_hi = number_from(j["t_hi"], where + ".t_hi");
  return f;
}

json to_json(const Box& b) { return json{{"lo", doubles_json(b.lo)}, {"hi", doubles_json(b.hi)}}; }

Box box_from_json(const json& j, const std::string& where) {
  expect_keys(j, {"lo", "hi"}, where);
  Box b{doubles(require(j, "lo", where), where + ".lo"), doubles(require(j, "hi", where), where + ".hi")};
  if (b.lo.size() != b.hi.size()) fail(ErrorKind::Config, where + " lo/hi dimension mismatch");
  return b;
}

json to_json(const ParamSet& ps) {
  json j;
  j["kind"] = to_string(ps.kind);
  j["d"] = ps.d;
  j["sample_budget"] = ps.sample_budget;
  switch (ps.kind) {
    case SetKind::Cube:
      j["corner"] = doubles_json(ps.corner);
      j["width"] = ps.width;
      break;
    case SetKind::HolderCurve: j["beta"] = ps.beta; [[fallthrough]];
    case SetKind::LipschitzCurve:
      j["curve"] = to_json(ps.curve);
      j["C"] = ps.C;
      break;
    case SetKind::SelfSimilar: {
      json maps = json::array();
      for (const auto& m : ps.maps) maps.push_back(json{{"ratio", m.ratio}, {"offset", doubles_json(m.offset)}});
      j["maps"] = maps;
      break;
    }
    case SetKind::HomogeneousCantor:
      j["rho"] = ps.rho;
      j["corner"] = doubles_json(ps.corner);
      j["width"] = ps.width;
      break;
    case SetKind::CombSet:
      j["depth_cap"] = ps.depth_cap;
      if (ps.window) j["window"] = to_json(*ps.window);
      break;
  }
  if (ps.outer_scale != 1.0) j["outer_scale"] = ps.outer_scale;
  if (!ps.outer_offset.empty()) j["outer_offset"] = doubles_json(ps.outer_offset);
  return j;
}

ParamSet paramset_from_json(const json& j) {
  const std::string where = "lambda";
  expect_keys(j, {"kind", "d", "sample_budget", "corner", "width", "curve", "C", "beta", "maps", "rho", "depth_cap",
                  "window", "outer_scale", "outer_offset"},
              where);
  return as_config([&] {
    const SetKind k = parse_set_kind(text(require(j, "kind", where), where + ".kind"));
    auto num = [&](const char* key) { return number_from(require(j, key, where), where + "." + key); };
    ParamSet ps;
    switch (k) {
      case SetKind::Cube: ps = ParamSet::cube(doubles(require(j, "corner", where), where + ".corner"), num("width")); break;
      case SetKind::LipschitzCurve: ps = ParamSet::lipschitz_curve(curve_from_json(require(j, "curve", where)), num("C")); break;
      case SetKind::HolderCurve:
        ps = ParamSet::holder_curve(curve_from_json(require(j, "curve", where)), num("C"), num("beta"));
        break;
      case SetKind::SelfSimilar: {
        const json& maps = require(j, "maps", where);
        if (!maps.is_array()) fail(ErrorKind::Config, where + ".maps must be an array");
        std::vector<Similarity> sims;
        for (std::size_t i = 0; i < maps.size(); ++i) {
          const std::string w = fmt::format("{}.maps[{}]", where, i);
          expect_keys(maps[i], {"ratio", "offset"}, w);
          sims.push_back({number_from(require(maps[i], "ratio", w), w + ".ratio"),
                          doubles(require(maps[i], "offset", w), w + ".offset")});
        }
        ps = ParamSet::self_similar(std::move(sims));
        break;
      }
      case SetKind::HomogeneousCantor: {
        const int d = j.contains("d") ? integer<int>(j["d"], where + ".d") : 2;
        ps = ParamSet::cantor(num("rho"), d, j.contains("corner") ? doubles(j["corner"], where + ".corner") : std::vector<double>{},
                              j.contains("width") ? num("width") : 1.0);
        break;
      }
      case SetKind::CombSet:
        ps = ParamSet::comb(j.contains("depth_cap") ? integer<int>(j["depth_cap"], where + ".depth_cap") : 12);
        if (j.contains("window")) ps.window = box_from_json(j["window"], where + ".window");
        break;
    }
    if (j.contains("d") && integer<int>(j["d"], where + ".d") != ps.d)
      fail(ErrorKind::Config, fmt::format("{}.d = {} disagrees with the descriptor dimension {}", where,
                                          j["d"].get<int>(), ps.d));
    if (j.contains("sample_budget")) ps.sample_budget = integer<std::size_t>(j["sample_budget"], where + ".sample_budget");
    if (j.contains("outer_scale")) ps.outer_scale = num("outer_scale");
    if (j.contains("outer_offset")) ps.outer_offset = doubles(j["outer_offset"], where + ".outer_offset");
    ps.validate();
    return ps;
  });
}

json to_json(const LogTuple& x) {
  json a = json::array();
  for (const auto& c : x) {
    json e = json::array();
    for (const auto& en : c.entries()) e.push_back(json::array({en.index, number(en.logmag), en.sign}));
    a.push_back(json{{"entries", e}});
  }
  return a;
}

LogTuple tuple_from_json(const json& j, int d, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    fail(ErrorKind::Config, fmt::format("{} must be an array of {} coordinates", where, d));
  LogTuple t(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const std::string w = fmt::format("{}[{}]", where, i);
    const json& c = j[static_cast<std::size_t>(i)];
    if (c.is_array()) {
      t[i] = LogSparseVector::from_dense(doubles(c, w));
      continue;
    }
    expect_keys(c, {"entries"}, w);
    const json& es = require(c, "entries", w);
    if (!es.is_array()) fail(ErrorKind::Config, w + ".entries must be an array");
    for (std::size_t k = 0; k < es.size(); ++k) {
      const std::string we = fmt::format("{}.entries[{}]", w, k);
      const json& e = es[k];
      if (!e.is_array() || e.size() != 3) fail(ErrorKind::Config, we + " must be [index, logmag, sign]");
      const int sign = integer<int>(e[2], we + "[2]");
      if (sign != 1 && sign != -1) fail(ErrorKind::Config, we + " sign must be +1 or -1");
      const Index idx = integer<Index>(e[0], we + "[0]");
      if (idx < 0) fail(ErrorKind::Config, we + " index must be nonnegative");
      t[i].add(idx, number_from(e[1], we + "[1]"), sign);
    }
  }
  return t;
}

json to_json(const Clause& c) {
  return json{{"id", c.id}, {"status", to_string(c.status)}, {"margin", number(c.margin)}, {"witness", c.witness}};
}

json to_json(const CriterionReport& r) {
  json cl = json::array();
  for (const auto& c : r.clauses) cl.push_back(to_json(c));
  return json{{"criterion", r.criterion}, {"pass", r.pass()}, {"clauses", cl}};
}

CriterionReport report_from_json(const json& j) {
  const std::string where = "report";
  expect_keys(j, {"criterion", "pass", "clauses"}, where);
  CriterionReport r;
  r.criterion = text(require(j, "criterion", where), where + ".criterion");
  const json& cl = require(j, "clauses", where);
  if (!cl.is_array()) fail(ErrorKind::Config, where + ".clauses must be an array");
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const std::string w = fmt::format("{}.clauses[{}]", where, i);
    expect_keys(cl[i], {"id", "status", "margin", "witness"}, w);
    Clause c;
    c.id = text(require(cl[i], "id", w), w + ".id");
    c.status = as_config([&] { return parse_status(text(require(cl[i], "status", w), w + ".status")); });
    c.margin = number_from(require(cl[i], "margin", w), w + ".margin");
    c.witness = cl[i].contains("witness") ? text(cl[i]["witness"], w + ".witness") : "";
    r.add(std::move(c));
  }
  return r;
}

json to_json(const Schedule& s) {
  json j;
  j["r"] = s.r;
  j["m"] = s.m;
  j["d"] = s.d;
  const auto& c = s.constants;
  j["constants"] = json{{"tau", number(c.tau)}, {"N", number(c.N)},         {"D", number(c.D)},
                        {"alpha", number(c.alpha)}, {"beta", number(c.beta)}, {"delta", number(c.delta)}};
  json es = json::array();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& e = s.entries[k];
    json row{{"digits", e.digits}, {"n", e.n}, {"anchor", doubles_json(e.anchor)}};
    if (k < s.cells.size()) {
      row["box"] = to_json(s.cells[k].box);
      row["diam_bound"] = number(s.cells[k].diam_bound);
    }
    es.push_back(row);
  }
  j["entries"] = es;
  json ch = json::array();
  for (const auto& cl : s.checks) ch.push_back(to_json(cl));
  j["checks"] = ch;
  return j;
}

Schedule schedule_from_json(const json& j) {
  const std::string where = "schedule";
  expect_keys(j, {"r", "m", "d", "constants", "entries", "checks"}, where);
  Schedule s;
  s.r = integer<int>(require(j, "r", where), where + ".r");
  s.m = integer<int>(require(j, "m", where), where + ".m");
  s.d = integer<int>(require(j, "d", where), where + ".d");
  if (s.d < 1) fail(ErrorKind::Config, where + ".d must be >= 1");
  if (j.contains("constants")) {
    const json& c = j["constants"];
    const std::string w = where + ".constants";
    expect_keys(c, {"tau", "N", "D", "alpha", "beta", "delta"}, w);
    auto get = [&](const char* k, double& out) {
      if (c.contains(k)) out = number_from(c[k], w + "." + k);
    };
    get("tau", s.constants.tau);
    get("N", s.constants.N);
    get("D", s.constants.D);
    get("alpha", s.constants.alpha);
    get("beta", s.constants.beta);
    get("delta", s.constants.delta);
  }
  const json& es = require(j, "entries", where);
  if (!es.is_array() || es.empty()) fail(ErrorKind::Config, where + ".entries must be a nonempty array");
  for (std::size_t k = 0; k < es.size(); ++k) {
    const std::string w = fmt::format("{}.entries[{}]", where, k);
    expect_keys(es[k], {"digits", "n", "anchor", "box", "diam_bound"}, w);
    ScheduleEntry e;
    if (es[k].contains("digits")) {
      const json& dg = es[k]["digits"];
      if (!dg.is_array()) fail(ErrorKind::Config, w + ".digits must be an array");
      for (std::size_t i = 0; i < dg.size(); ++i) e.digits.push_back(integer<int>(dg[i], w + ".digits"));
    }
    e.n = integer<Index>(require(es[k], "n", w), w + ".n");
    e.anchor = doubles(require(es[k], "anchor", w), w + ".anchor");
    if (static_cast<int>(e.anchor.size()) != s.d) fail(ErrorKind::Config, w + ".anchor has the wrong dimension");
    Cell cell;
    cell.digits = e.digits;
    cell.anchor = e.anchor;
    cell.box = es[k].contains("box") ? box_from_json(es[k]["box"], w + ".box") : Box{e.anchor, e.anchor};
    if (static_cast<int>(cell.box.lo.size()) != s.d) fail(ErrorKind::Config, w + ".box has the wrong dimension");
    if (es[k].contains("diam_bound")) cell.diam_bound = number_from(es[k]["diam_bound"], w + ".diam_bound");
    cell.samples = PointCloud(s.d);
    s.entries.push_back(std::move(e));
    s.cells.push_back(std::move(cell));
  }
  if (j.contains("checks")) {
    CriterionReport r = report_from_json(json{{"criterion", "checks"}, {"clauses", j["checks"]}});
    s.checks = std::move(r.clauses);
  }
  return s;
}

json to_json(const CandidateVector& x) {
  json j;
  j["d"] = x.d;
  j["norm"] = to_string(x.norm);
  j["support_width"] = x.support_width();
  j["u"] = to_json(x.u);
  j["x"] = to_json(x.x);
  json rounds = json::array();
  for (const auto& r : x.rounds)
    rounds.push_back(json{{"target", r.target},
                          {"piece", r.piece},
                          {"N", r.N},
                          {"escalations", r.escalations},
                          {"achieved_eps", number(r.achieved_eps)},
                          {"report", to_json(r.report)},
                          {"schedule", to_json(r.schedule)}});
  j["rounds"] = rounds;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string schedule_csv(const Schedule& s) {
  std::string out = "k,digits,n";
  for (int b = 0; b < s.d; ++b) out += fmt::format(",anchor_{}", b);
  for (int b = 0; b < s.d; ++b) out += fmt::format(",lo_{}", b);
  for (int b = 0; b < s.d; ++b) out += fmt::format(",hi_{}", b);
  out += '\n';
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& e = s.entries[k];
    std::string dg;
    for (std::size_t i = 0; i < e.digits.size(); ++i) dg += (i ? "." : "") + std::to_string(e.digits[i]);
    out += fmt::format("{},{},{}", k + 1, dg, e.n);
    for (double a : e.anchor) out += "," + fmt_double(a);
    const Box& b = s.cells[k].box;
    for (double v : b.lo) out += "," + fmt_double(v);
    for (double v : b.hi) out += "," + fmt_double(v);
    out += '\n';
  }
  return out;
}

std::string report_csv(const CriterionReport& r) {
  std::string out = "criterion,clause,status,margin,witness\n";
  for (const auto& c : r.clauses)
    out += fmt::format("{},{},{},{},{}\n", csv_field(r.criterion), csv_field(c.id), to_string(c.status),
                       fmt_double(c.margin), csv_field(c.witness));
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IO, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, fmt::format("{}: {}", path, e.what()));
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IO, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::IO, "write failed for " + path);
}

}  // namespace hclab
