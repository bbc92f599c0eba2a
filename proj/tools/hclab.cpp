// hclab: batch front end. One subcommand per pipeline, JSON config in,
// CSV tables and report.json out.
//
// Exit codes: 0 pass, 1 criterion failed, 2 config error, 3 capacity,
// 4 I/O.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>
#include <random>

#include "hclab/constructor.hpp"
#include "hclab/criteria.hpp"
#include "hclab/errors.hpp"
#include "hclab/parallel.hpp"
#include "hclab/paramsets.hpp"
#include "hclab/probes.hpp"
#include "hclab/schedule.hpp"
#include "hclab/serialize.hpp"

using namespace hclab;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kCapacity = 3, kIO = 4 };

struct Context {
  std::string command;
  json config;
  std::filesystem::path out;
  std::uint64_t seed = 0;

  void write(const std::string& name, const std::string& text) const { write_text_file((out / name).string(), text); }
  void report(json body, bool pass) const {
    json j;
    j["schema"] = kSchema;
    j["command"] = command;
    j["pass"] = pass;
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    write("report.json", j.dump(2) + "\n");
  }
};

double num(const json& j, const char* key, const std::string& where, double def) {
  return j.contains(key) ? number_from(j[key], where + "." + key) : def;
}

template <class T>
T integer(const json& j, const char* key, const std::string& where, T def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer()) fail(ErrorKind::Config, fmt::format("{}.{} must be an integer", where, key));
  return j[key].get<T>();
}

bool boolean(const json& j, const char* key, const std::string& where, bool def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_boolean()) fail(ErrorKind::Config, fmt::format("{}.{} must be a boolean", where, key));
  return j[key].get<bool>();
}

std::string str(const json& j, const char* key, const std::string& where, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string()) fail(ErrorKind::Config, fmt::format("{}.{} must be a string", where, key));
  return j[key].get<std::string>();
}

template <class F>
auto config_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Invalid || e.kind() == ErrorKind::Domain) fail(ErrorKind::Config, e.what());
    throw;
  }
}

CoveringParams covering_params(const json& j) {
  const std::string w = "covering";
  expect_keys(j, {"tau", "delta", "N", "alpha", "beta", "D", "m_cap", "allow_presubdivision", "max_cells", "verify_budget"}, w);
  CoveringParams p;
  p.tau = num(j, "tau", w, p.tau);
  p.delta = num(j, "delta", w, p.delta);
  p.N = integer<Index>(j, "N", w, p.N);
  p.alpha = num(j, "alpha", w, p.alpha);
  p.beta = num(j, "beta", w, p.beta);
  p.D = num(j, "D", w, p.D);
  p.m_cap = integer<int>(j, "m_cap", w, p.m_cap);
  p.allow_presubdivision = boolean(j, "allow_presubdivision", w, p.allow_presubdivision);
  p.max_cells = integer<std::int64_t>(j, "max_cells", w, p.max_cells);
  p.verify_budget = integer<std::size_t>(j, "verify_budget", w, p.verify_budget);
  return p;
}

LipschitzScheduleParams lipschitz_params(const json& j) {
  const std::string w = "lipschitz";
  expect_keys(j, {"tau", "N", "M", "k0", "q_cap", "interior_samples"}, w);
  LipschitzScheduleParams p;
  p.tau = num(j, "tau", w, p.tau);
  p.N = integer<Index>(j, "N", w, p.N);
  p.M = integer<Index>(j, "M", w, p.M);
  p.k0 = integer<Index>(j, "k0", w, p.k0);
  p.q_cap = integer<std::size_t>(j, "q_cap", w, p.q_cap);
  p.interior_samples = integer<int>(j, "interior_samples", w, p.interior_samples);
  return p;
}

BasicOptions basic_options(const json& j) {
  const std::string w = "basic";
  expect_keys(j, {"lambda_per_axis", "norm", "eval_budget"}, w);
  BasicOptions o;
  o.lambda_per_axis = integer<int>(j, "lambda_per_axis", w, o.lambda_per_axis);
  if (j.contains("norm")) o.norm = config_guard([&] { return parse_norm_tag(str(j, "norm", w, "sup")); });
  o.eval_budget = integer<std::size_t>(j, "eval_budget", w, o.eval_budget);
  return o;
}

std::string schedules_csv(const std::vector<Schedule>& ss) {
  std::string out;
  for (std::size_t p = 0; p < ss.size(); ++p) {
    std::string body = schedule_csv(ss[p]);
    std::size_t pos = 0;
    bool header = true;
    while (pos < body.size()) {
      std::size_t nl = body.find('\n', pos);
      std::string line = body.substr(pos, nl - pos);
      if (header) {
        if (p == 0) out += "piece," + line + "\n";
      } else {
        out += fmt::format("{},{}\n", p, line);
      }
      header = false;
      pos = nl + 1;
    }
  }
  return out;
}

json clauses_json(const std::vector<Clause>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back(to_json(c));
  return a;
}

// ---------------------------------------------------------------- schedule

int cmd_schedule(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "mode", "recursion", "lambda", "covering", "lipschitz"}, "config");
  const std::string mode = str(c, "mode", "config", "");
  if (mode == "sequence") {
    const json& r = require(c, "recursion", "config");
    const std::string w = "recursion";
    expect_keys(r, {"alpha", "rho", "r", "m", "n1", "A"}, w);
    RecursionParams p;
    p.alpha = num(r, "alpha", w, p.alpha);
    p.rho = num(r, "rho", w, p.rho);
    p.r = integer<int>(r, "r", w, p.r);
    p.m = integer<int>(r, "m", w, p.m);
    p.n1 = integer<Index>(r, "n1", w, p.n1);
    p.A = integer<Index>(r, "A", w, p.A);
    try {
      p.validate();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Divergence)
        fail(ErrorKind::Config, fmt::format("the time recursion needs rho^(1/alpha) r < 1: {}", e.what()));
      throw;
    }
    auto seq = config_guard([&] { return build_sequence(p); });
    RecursionConstants rc = recursion_constants(p.alpha, p.rho, p.r);
    Index mx = 0;
    std::string csv = "t,n\n";
    for (std::size_t t = 0; t < seq.size(); ++t) {
      mx = std::max(mx, seq[t]);
      csv += fmt::format("{},{}\n", t + 1, seq[t]);
    }
    ctx.write("sequence.csv", csv);
    const double bound = rc.c1 * static_cast<double>(p.n1) + rc.c2 * std::pow(p.r, p.m) * static_cast<double>(p.A);
    const bool ok = static_cast<double>(mx) <= bound;
    ctx.report({{"mode", mode},
                {"length", seq.size()},
                {"max", mx},
                {"c1", rc.c1},
                {"c2", rc.c2},
                {"bound", number(bound)}},
               ok);
    fmt::print("sequence: {} terms, max {} vs bound {:.6g}: {}\n", seq.size(), mx, bound, ok ? "PASS" : "FAIL");
    return ok ? kPass : kFail;
  }
  if (mode == "covering") {
    ParamSet lambda = paramset_from_json(require(c, "lambda", "config"));
    CoveringParams p = covering_params(c.contains("covering") ? c["covering"] : json::object());
    CoveringSolution sol = config_guard([&] { return solve_covering(lambda, p); });
    ctx.write("schedule.csv", schedules_csv(sol.schedules));
    json sch = json::array();
    for (const auto& s : sol.schedules) sch.push_back(to_json(s));
    const auto& t = sol.trace;
    const bool ok = sol.verification.pass();
    ctx.report({{"mode", mode},
                {"presubdivision_depth", sol.presubdivision_depth},
                {"trace",
                 {{"c1", t.c1}, {"c2", t.c2}, {"kappa", t.kappa}, {"s", t.s}, {"A", t.A}, {"m", t.m}, {"n1", t.n1},
                  {"C_piece", t.C_piece}}},
                {"verification", to_json(sol.verification)},
                {"schedules", sch}},
               ok);
    std::size_t q = 0;
    for (const auto& s : sol.schedules) q += s.size();
    fmt::print("covering: {} pieces, m = {}, {} cells, n_1 = {}, verification {}\n", sol.pieces.size(), t.m, q, t.n1,
               ok ? "PASS" : "FAIL");
    return ok ? kPass : kFail;
  }
  if (mode == "lipschitz") {
    ParamSet lambda = paramset_from_json(require(c, "lambda", "config"));
    LipschitzScheduleParams p = lipschitz_params(c.contains("lipschitz") ? c["lipschitz"] : json::object());
    Schedule s = config_guard([&] { return lipschitz_schedule(lambda, p); });
    CriterionReport carac = check_caracstandard(s, lambda, p.tau, static_cast<double>(p.N));
    ctx.write("schedule.csv", schedule_csv(s));
    const bool ok = s.checks_pass() && carac.pass();
    ctx.report({{"mode", mode}, {"checks", clauses_json(s.checks)}, {"caracstandard", to_json(carac)}, {"schedule", to_json(s)}},
               ok);
    fmt::print("lipschitz: {} cells, n_q = {}, caracstandard {}\n", s.size(), s.entries.back().n, carac.pass() ? "PASS" : "FAIL");
    return ok ? kPass : kFail;
  }
  fail(ErrorKind::Config, "config.mode must be sequence, covering or lipschitz");
}

// ------------------------------------------------------------------- cover

int cmd_cover(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "lambda", "m", "depths"}, "config");
  ParamSet lambda = paramset_from_json(require(c, "lambda", "config"));
  const int m = integer<int>(c, "m", "config", 2);
  CoverFamily cf = config_guard([&] { return build_cover(lambda, m); });
  CoverCheck chk = verify_cover(lambda, cf);
  std::string csv = "k,digits,samples,diam_bound";
  for (int b = 0; b < cf.d; ++b) csv += fmt::format(",anchor_{}", b);
  for (int b = 0; b < cf.d; ++b) csv += fmt::format(",lo_{}", b);
  for (int b = 0; b < cf.d; ++b) csv += fmt::format(",hi_{}", b);
  csv += "\n";
  for (std::size_t k = 0; k < cf.cells.size(); ++k) {
    const Cell& cell = cf.cells[k];
    std::string dg;
    for (std::size_t i = 0; i < cell.digits.size(); ++i) dg += (i ? "." : "") + std::to_string(cell.digits[i]);
    csv += fmt::format("{},{},{},{}", k + 1, dg, cell.samples.size(), fmt_double(cell.diam_bound));
    for (int b = 0; b < cf.d; ++b) csv += "," + (cell.empty() ? std::string() : fmt_double(cell.anchor[b]));
    for (int b = 0; b < cf.d; ++b) csv += "," + (cell.empty() ? std::string() : fmt_double(cell.box.lo[b]));
    for (int b = 0; b < cf.d; ++b) csv += "," + (cell.empty() ? std::string() : fmt_double(cell.box.hi[b]));
    csv += "\n";
  }
  ctx.write("cells.csv", csv);

  json body{{"r", cf.r},
            {"m", cf.m},
            {"gamma", cf.gamma},
            {"C_Lambda", cf.C_Lambda},
            {"eta", cf.eta},
            {"check",
             {{"worst_diam_ratio", number(chk.worst_diam_ratio)},
              {"worst_nesting_excess", number(chk.worst_nesting_excess)},
              {"uncovered", chk.uncovered}}}};
  if (c.contains("depths")) {
    std::vector<int> depths;
    for (const auto& d : c["depths"]) {
      if (!d.is_number_integer()) fail(ErrorKind::Config, "config.depths must hold integers");
      depths.push_back(d.get<int>());
    }
    BoxDimEstimate e = config_guard([&] { return box_dim_estimate(lambda, depths); });
    std::string bc = "m,eps,count\n";
    for (std::size_t i = 0; i < e.depths.size(); ++i)
      bc += fmt::format("{},{},{}\n", e.depths[i], fmt_double(std::ldexp(1.0, -e.depths[i])), e.counts[i]);
    ctx.write("boxcount.csv", bc);
    body["box_dimension"] = {{"slope", e.slope}, {"residual", e.residual}};
  }
  ctx.report(body, chk.ok());
  fmt::print("cover: r = {}, m = {}, {} cells, check {}\n", cf.r, cf.m, cf.cells.size(), chk.ok() ? "PASS" : "FAIL");
  return chk.ok() ? kPass : kFail;
}

// ------------------------------------------------------------------ verify

Schedule load_schedule(const json& c) {
  const json& s = require(c, "schedule", "config");
  if (s.is_object()) return schedule_from_json(s);
  if (!s.is_string()) fail(ErrorKind::Config, "config.schedule must be an object or a path");
  json doc = read_json_file(s.get<std::string>());
  const std::size_t piece = integer<std::size_t>(c, "piece", "config", 0);
  if (doc.contains("schedules")) {
    if (piece >= doc["schedules"].size()) fail(ErrorKind::Config, "config.piece is out of range");
    return schedule_from_json(doc["schedules"][piece]);
  }
  if (doc.contains("schedule")) return schedule_from_json(doc["schedule"]);
  return schedule_from_json(doc);
}

int cmd_verify(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "criterion", "schedule", "piece", "lambda", "weights", "tau", "N", "alpha", "eps", "u", "v",
                  "basic", "pair_budget", "interval", "grid"},
              "config");
  const std::string crit = str(c, "criterion", "config", "");
  CriterionReport rep;
  if (crit == "hypotheses") {
    WeightFamily w = weight_from_json(require(c, "weights", "config"));
    auto iv = require(c, "interval", "config");
    if (!iv.is_array() || iv.size() != 2) fail(ErrorKind::Config, "config.interval must be [lo, hi]");
    Interval I{number_from(iv[0], "config.interval"), number_from(iv[1], "config.interval")};
    HypothesisGrid g;
    if (c.contains("grid")) {
      const json& gj = c["grid"];
      expect_keys(gj, {"a_points", "n_max", "per_decade"}, "grid");
      g.a_points = integer<int>(gj, "a_points", "grid", g.a_points);
      g.n_max = integer<Index>(gj, "n_max", "grid", g.n_max);
      g.per_decade = integer<int>(gj, "per_decade", "grid", g.per_decade);
    }
    HypothesisEstimate e = config_guard([&] { return estimate_hypotheses(w, I, num(c, "alpha", "config", 1.0), g); });
    const bool ok = e.critere1 || e.critere2;
    ctx.report({{"criterion", crit},
                {"alpha", e.alpha},
                {"C1_power", number(e.C1_power)},
                {"C1_log", number(e.C1_log)},
                {"C2_power", number(e.C2_power)},
                {"C3", number(e.C3)},
                {"C2_log", number(e.C2_log)},
                {"kappa", number(e.kappa)},
                {"critere1", e.critere1},
                {"critere2", e.critere2},
                {"diagnostics", e.diagnostics}},
               ok);
    fmt::print("hypotheses: critere1 {}, critere2 {}\n", e.critere1, e.critere2);
    return ok ? kPass : kFail;
  }

  Schedule s = load_schedule(c);
  const double N = num(c, "N", "config", 1.0);
  if (crit == "walpha") {
    rep = check_walpha(s, num(c, "alpha", "config", 1.0), N);
  } else {
    ParamSet K = paramset_from_json(require(c, "lambda", "config"));
    if (K.d != s.d) fail(ErrorKind::Config, "lambda and schedule dimensions differ");
    attach_samples(s, K);
    const double tau = num(c, "tau", "config", 1.0);
    if (crit == "caracstandard") {
      rep = check_caracstandard(s, K, tau, N);
    } else if (crit == "carac_general" || crit == "basic") {
      WeightFamily w = weight_from_json(require(c, "weights", "config"));
      const double eps = num(c, "eps", "config", 0.1);
      BasicOptions bo = basic_options(c.contains("basic") ? c["basic"] : json::object());
      if (crit == "carac_general") {
        auto model = w.lipschitz_model();
        if (!model) fail(ErrorKind::Config, "carac_general needs a family with a Lipschitz scale");
        CaracOptions co;
        co.norm = bo.norm;
        co.pair_budget = integer<std::size_t>(c, "pair_budget", "config", co.pair_budget);
        LipschitzModel lm = *model;
        rep = check_carac_general(s, w, [lm](Index n) { return lm.F(n); }, K, tau, static_cast<Index>(N), eps, co);
      } else {
        LogTuple u = c.contains("u") ? tuple_from_json(c["u"], s.d, "config.u") : LogTuple(static_cast<std::size_t>(s.d));
        LogTuple v = tuple_from_json(require(c, "v", "config"), s.d, "config.v");
        rep = config_guard([&] { return check_basic_criterion(s, w, u, v, eps, K, bo); });
      }
    } else {
      fail(ErrorKind::Config, "config.criterion must be caracstandard, walpha, carac_general, basic or hypotheses");
    }
  }
  ctx.write("report.csv", report_csv(rep));
  ctx.report({{"criterion", crit}, {"report", to_json(rep)}}, rep.pass());
  for (const auto& cl : rep.clauses)
    fmt::print("{} {}: {} margin {:.6g} {}\n", rep.criterion, cl.id, to_string(cl.status), cl.margin, cl.witness);
  return rep.pass() ? kPass : kFail;
}

// --------------------------------------------------------------- construct

int cmd_construct(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "weights", "lambda", "targets", "u", "synthesis", "lambda_count"}, "config");
  WeightFamily w = weight_from_json(require(c, "weights", "config"));
  ParamSet lambda = paramset_from_json(require(c, "lambda", "config"));
  const json& tj = require(c, "targets", "config");
  if (!tj.is_array() || tj.empty()) fail(ErrorKind::Config, "config.targets must be a nonempty array");
  std::vector<LogTuple> targets;
  for (std::size_t i = 0; i < tj.size(); ++i) targets.push_back(tuple_from_json(tj[i], lambda.d, fmt::format("config.targets[{}]", i)));
  LogTuple u = c.contains("u") ? tuple_from_json(c["u"], lambda.d, "config.u") : LogTuple{};

  SynthesisParams p;
  if (c.contains("synthesis")) {
    const json& sj = c["synthesis"];
    const std::string ws = "synthesis";
    expect_keys(sj, {"eps", "source", "N_base", "escalations", "truncation_cap", "basic", "covering", "tau", "M", "q_cap"}, ws);
    p.eps = num(sj, "eps", ws, p.eps);
    if (sj.contains("source")) p.source = config_guard([&] { return parse_schedule_source(str(sj, "source", ws, "")); });
    p.N_base = integer<Index>(sj, "N_base", ws, p.N_base);
    p.escalations = integer<int>(sj, "escalations", ws, p.escalations);
    p.truncation_cap = integer<Index>(sj, "truncation_cap", ws, p.truncation_cap);
    if (sj.contains("basic")) p.basic = basic_options(sj["basic"]);
    if (sj.contains("covering")) p.covering = covering_params(sj["covering"]);
    p.tau = num(sj, "tau", ws, p.tau);
    p.M = integer<Index>(sj, "M", ws, p.M);
    p.q_cap = integer<std::size_t>(sj, "q_cap", ws, p.q_cap);
  }
  const std::size_t count = integer<std::size_t>(c, "lambda_count", "config", 200);

  CandidateVector x = config_guard([&] { return synthesize(w, u, targets, lambda, p); });
  CriterionReport orbits = verify_orbits(x, w, lambda, targets, p.eps, count);

  std::string csv = "round,target,piece,N,escalations,cells,n_first,n_last,achieved_eps,pass\n";
  bool ok = orbits.pass();
  for (std::size_t i = 0; i < x.rounds.size(); ++i) {
    const Round& r = x.rounds[i];
    ok = ok && r.report.pass();
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i, r.target, r.piece, r.N, r.escalations, r.schedule.size(),
                       r.schedule.entries.front().n, r.schedule.entries.back().n, fmt_double(r.achieved_eps),
                       r.report.pass() ? 1 : 0);
  }
  ctx.write("rounds.csv", csv);
  ctx.write("candidate.json", json{{"schema", kSchema}, {"candidate", to_json(x)}}.dump(1) + "\n");
  ctx.write("report.csv", report_csv(orbits));
  ctx.report({{"rounds", x.rounds.size()}, {"support_width", x.support_width()}, {"orbits", to_json(orbits)}}, ok);
  for (const auto& cl : orbits.clauses)
    fmt::print("orbits {}: {} margin {:.6g} {}\n", cl.id, to_string(cl.status), cl.margin, cl.witness);
  fmt::print("construct: {} rounds, support {}: {}\n", x.rounds.size(), x.support_width(), ok ? "PASS" : "FAIL");
  return ok ? kPass : kFail;
}

// ------------------------------------------------------------------- probe

int probe_separation(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "probe", "weights", "pairs", "random_pairs", "box", "n", "u", "v", "delta", "norm"}, "config");
  WeightFamily w = weight_from_json(require(c, "weights", "config"));
  const Index n = integer<Index>(c, "n", "config", 1);
  const double delta = num(c, "delta", "config", 0.5);
  NormTag norm = config_guard([&] { return parse_norm_tag(str(c, "norm", "config", "sup")); });
  std::vector<std::pair<ProductParam, ProductParam>> pairs;
  if (c.contains("pairs")) {
    for (const auto& pr : c["pairs"]) {
      if (!pr.is_array() || pr.size() != 2) fail(ErrorKind::Config, "config.pairs entries must be [lambda, mu]");
      ProductParam a, b;
      for (const auto& x : pr[0]) a.push_back(number_from(x, "config.pairs"));
      for (const auto& x : pr[1]) b.push_back(number_from(x, "config.pairs"));
      pairs.emplace_back(a, b);
    }
  }
  if (c.contains("random_pairs")) {
    Box box = box_from_json(require(c, "box", "config"), "config.box");
    std::mt19937_64 rng(ctx.seed);
    const auto k = integer<std::size_t>(c, "random_pairs", "config", 0);
    for (std::size_t i = 0; i < k; ++i) {
      ProductParam a, b;
      for (std::size_t d = 0; d < box.lo.size(); ++d) {
        std::uniform_real_distribution<double> U(box.lo[d], box.hi[d]);
        a.push_back(U(rng));
        b.push_back(U(rng));
      }
      pairs.emplace_back(a, b);
    }
  }
  if (pairs.empty()) fail(ErrorKind::Config, "separation probe needs pairs or random_pairs");
  const int d = static_cast<int>(pairs.front().first.size());
  LogTuple u = tuple_from_json(require(c, "u", "config"), d, "config.u");
  LogTuple v = tuple_from_json(require(c, "v", "config"), d, "config.v");
  std::string csv = "pair,lhs,rhs,dist_lambda,dist_mu,status\n";
  std::size_t fails = 0, applicable = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto r = config_guard([&] { return separation_bound(w, pairs[i].first, pairs[i].second, n, u, v, delta, norm); });
    if (r.status == Status::Fail || r.status == Status::Indeterminate) ++fails;
    if (r.status != Status::NotApplicable) ++applicable;
    csv += fmt::format("{},{},{},{},{},{}\n", i, fmt_double(r.lhs), fmt_double(r.rhs), fmt_double(r.dist_lambda),
                       fmt_double(r.dist_mu), to_string(r.status));
  }
  ctx.write("separation.csv", csv);
  ctx.report({{"probe", "separation"}, {"pairs", pairs.size()}, {"applicable", applicable}, {"failures", fails}}, fails == 0);
  fmt::print("separation: {} pairs, {} applicable, {} failures\n", pairs.size(), applicable, fails);
  return fails == 0 ? kPass : kFail;
}

int probe_diameter(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "probe", "weights", "instances", "delta", "grid", "norm"}, "config");
  WeightFamily w = weight_from_json(require(c, "weights", "config"));
  const double delta = num(c, "delta", "config", 0.25);
  NormTag norm = config_guard([&] { return parse_norm_tag(str(c, "norm", "config", "sup")); });
  const json& g = require(c, "grid", "config");
  expect_keys(g, {"lo", "hi", "step"}, "grid");
  const double step = num(g, "step", "grid", 1e-5);
  PointCloud grid = config_guard([&] { return line_grid(num(g, "lo", "grid", 1.0), num(g, "hi", "grid", 2.0), step); });
  const json& inst = require(c, "instances", "config");
  if (!inst.is_array()) fail(ErrorKind::Config, "config.instances must be an array");
  std::string csv = "instance,n,diameter,bound,hits,pass\n";
  std::size_t fails = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const std::string wi = fmt::format("instances[{}]", i);
    expect_keys(inst[i], {"n", "u", "v"}, wi);
    const Index n = integer<Index>(inst[i], "n", wi, 1);
    LogTuple u = tuple_from_json(require(inst[i], "u", wi), 1, wi + ".u");
    LogTuple v = tuple_from_json(require(inst[i], "v", wi), 1, wi + ".v");
    DiameterResult r = config_guard([&] { return admissible_diameter(w, u, v, n, delta, grid, step, norm); });
    if (!r.pass()) ++fails;
    csv += fmt::format("{},{},{},{},{},{}\n", i, n, fmt_double(r.diameter), fmt_double(r.bound), r.hits, r.pass() ? 1 : 0);
  }
  ctx.write("diameter.csv", csv);
  ctx.report({{"probe", "diameter"}, {"instances", inst.size()}, {"failures", fails}}, fails == 0);
  fmt::print("diameter: {} instances, {} violations\n", inst.size(), fails);
  return fails == 0 ? kPass : kFail;
}

int probe_gauge(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "probe", "cases", "delta", "n_max"}, "config");
  const double delta = num(c, "delta", "config", 0.5);
  const Index n_max = integer<Index>(c, "n_max", "config", 100000);
  std::string csv = "gauge,C,alpha,partial_sum,p,q,observed_p,class\n";
  const json& cases = require(c, "cases", "config");
  if (!cases.is_array()) fail(ErrorKind::Config, "config.cases must be an array");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string wi = fmt::format("cases[{}]", i);
    expect_keys(cases[i], {"gauge", "C", "alpha"}, wi);
    GaugeFn phi = config_guard([&] { return parse_gauge(str(cases[i], "gauge", wi, "")); });
    PowerRate psi{num(cases[i], "C", wi, 1.0), num(cases[i], "alpha", wi, 1.0)};
    auto r = config_guard([&] { return gauge_series(phi, psi, delta, n_max); });
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(phi), fmt_double(psi.C), fmt_double(psi.alpha),
                       fmt_double(r.partial_sum), fmt_double(r.p), fmt_double(r.q), fmt_double(r.observed_p),
                       to_string(r.tail));
  }
  ctx.write("gauge.csv", csv);
  ctx.report({{"probe", "gauge"}, {"cases", cases.size()}}, true);
  fmt::print("gauge: {} cases classified\n", cases.size());
  return kPass;
}

int probe_saut(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "probe", "a_k", "a_j", "alpha", "n_k"}, "config");
  const double ak = num(c, "a_k", "config", 2.0), aj = num(c, "a_j", "config", 1.5), al = num(c, "alpha", "config", 0.5);
  const Index nk = integer<Index>(c, "n_k", "config", 1000);
  const Index nj = config_guard([&] { return saut_bound(ak, aj, al, nk); });
  ctx.write("saut.csv", fmt::format("a_k,a_j,alpha,n_k,n_j\n{},{},{},{},{}\n", fmt_double(ak), fmt_double(aj), fmt_double(al), nk, nj));
  ctx.report({{"probe", "saut"}, {"n_j", nj}}, true);
  fmt::print("saut: n_j >= {}\n", nj);
  return kPass;
}

int probe_comb(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "probe", "m_lo", "m_hi"}, "config");
  const int lo = integer<int>(c, "m_lo", "config", 3), hi = integer<int>(c, "m_hi", "config", 10);
  std::string csv = "m,count,lower,realized_c\n";
  bool ok = true;
  std::vector<int> depths;
  for (int m = lo; m <= hi; ++m) {
    CombCount cc = config_guard([&] { return comb_count(m); });
    ok = ok && static_cast<double>(cc.count) >= cc.lower;
    csv += fmt::format("{},{},{},{}\n", m, cc.count, fmt_double(cc.lower), fmt_double(cc.realized_c));
    depths.push_back(m);
  }
  ctx.write("comb.csv", csv);
  json body{{"probe", "comb"}};
  if (depths.size() >= 3) {
    BoxDimEstimate e = box_dim_estimate(ParamSet::comb(hi + 1), depths);
    body["slope"] = e.slope;
  }
  ctx.report(body, ok);
  fmt::print("comb: m = {}..{}, lower bound {}\n", lo, hi, ok ? "holds" : "VIOLATED");
  return ok ? kPass : kFail;
}

int cmd_probe(const Context& ctx) {
  const std::string probe = str(ctx.config, "probe", "config", "");
  if (probe == "separation") return probe_separation(ctx);
  if (probe == "diameter") return probe_diameter(ctx);
  if (probe == "gauge") return probe_gauge(ctx);
  if (probe == "saut") return probe_saut(ctx);
  if (probe == "comb") return probe_comb(ctx);
  fail(ErrorKind::Config, "config.probe must be separation, diameter, gauge, saut or comb");
}

// --------------------------------------------------------------- orderings

int cmd_orderings(const Context& ctx) {
  const json& c = ctx.config;
  expect_keys(c, {"schema", "m", "alpha", "N", "slack", "D_ref", "orderings"}, "config");
  OrderingParams p;
  p.m = integer<int>(c, "m", "config", p.m);
  p.alpha = num(c, "alpha", "config", p.alpha);
  p.N = integer<Index>(c, "N", "config", p.N);
  p.slack = num(c, "slack", "config", p.slack);
  p.D_ref = num(c, "D_ref", "config", p.D_ref);
  std::vector<Ordering> which{Ordering::First, Ordering::Second, Ordering::Third};
  if (c.contains("orderings")) {
    which.clear();
    for (const auto& o : c["orderings"]) which.push_back(config_guard([&] { return parse_ordering(o.get<std::string>()); }));
  }
  std::string table = "ordering,m,n_final,threshold,ratio,admissible,D_star,D_local,saut2,saut_violations\n";
  std::string seqs = "ordering,k,n,lo_a,lo_b\n";
  json rows = json::array();
  bool ok = true;
  for (Ordering o : which) {
    OrderingExperiment ex = config_guard([&] { return ordering_cost(p, o); });
    ok = ok && ex.saut_violations == 0;
    table += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", to_string(o), p.m, ex.n_final, fmt_double(ex.threshold),
                         fmt_double(ex.ratio()), ex.admissible ? 1 : 0, fmt_double(ex.D_star), fmt_double(ex.D_local),
                         ex.saut2 ? 1 : 0,
                         ex.saut_violations);
    for (std::size_t k = 0; k < ex.n.size(); ++k)
      seqs += fmt::format("{},{},{},{},{}\n", to_string(o), k + 1, ex.n[k], fmt_double(ex.cells[k].lo[0]),
                          fmt_double(ex.cells[k].lo[1]));
    rows.push_back({{"ordering", to_string(o)},
                    {"n_final", ex.n_final},
                    {"threshold", ex.threshold},
                    {"admissible", ex.admissible},
                    {"D_star", number(ex.D_star)},
                    {"D_local", number(ex.D_local)},
                    {"saut2", ex.saut2},
                    {"saut_violations", ex.saut_violations}});
    fmt::print("{:>6}: n_final {:>14} ratio {:10.4g} admissible {} D* {:.4g}\n", to_string(o), ex.n_final, ex.ratio(),
               ex.admissible, ex.D_star);
  }
  ctx.write("orderings.csv", table);
  ctx.write("sequences.csv", seqs);
  ctx.report({{"m", p.m}, {"alpha", p.alpha}, {"N", p.N}, {"orderings", rows}}, ok);
  return ok ? kPass : kFail;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Capacity:
    case ErrorKind::Range: return kCapacity;
    case ErrorKind::IO: return kIO;
    case ErrorKind::Synthesis: return kFail;
    default: return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hclab: common hypercyclicity schedules, criteria and probes"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON configuration")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--seed", seed, "seed for randomized sweeps");
  app.fallthrough();
  const std::vector<std::pair<std::string, int (*)(const Context&)>> commands{
      {"schedule", cmd_schedule}, {"cover", cmd_cover},         {"verify", cmd_verify},
      {"construct", cmd_construct}, {"probe", cmd_probe}, {"orderings", cmd_orderings}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, name + " pipeline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  try {
    set_thread_count(threads);
    Context ctx;
    ctx.config = read_json_file(config_path);
    if (!ctx.config.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
    if (ctx.config.contains("schema") && ctx.config["schema"] != kSchema)
      fail(ErrorKind::Config, fmt::format("unsupported schema {}, expected {}", ctx.config["schema"].dump(), kSchema));
    ctx.out = out_dir;
    ctx.seed = seed;
    std::error_code ec;
    std::filesystem::create_directories(ctx.out, ec);
    if (ec) fail(ErrorKind::IO, fmt::format("cannot create {}: {}", out_dir, ec.message()));
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) {
        ctx.command = name;
        return fn(ctx);
      }
    return kConfig;
  } catch (const Error& e) {
    fmt::print(stderr, "hclab: {} error: {}\n", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    fmt::print(stderr, "hclab: config error: {}\n", e.what());
    return kConfig;
  }
}
