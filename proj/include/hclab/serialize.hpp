#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "hclab/constructor.hpp"
#include "hclab/criteria.hpp"
#include "hclab/paramsets.hpp"
#include "hclab/report.hpp"
#include "hclab/schedule.hpp"
#include "hclab/seqspace.hpp"

namespace hclab {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "hclab/1";

// Config errors name the offending key path.
void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);
const json& require(const json& j, const char* key, const std::string& where);

// Non-finite numbers become the strings "inf", "-inf" and "nan".
json number(double x);
double number_from(const json& j, const std::string& where);
// %.17g, round-trips doubles.
std::string fmt_double(double x);

json to_json(const WeightFamily& w);
WeightFamily weight_from_json(const json& j);

json to_json(const CurveMap& f);
CurveMap curve_from_json(const json& j);
json to_json(const ParamSet& ps);
ParamSet paramset_from_json(const json& j);
json to_json(const Box& b);
Box box_from_json(const json& j, const std::string& where);

// A tuple is an array of d coordinates. Each coordinate is a dense array of
// values or {"entries": [[index, logmag, sign], ...]}.
json to_json(const LogTuple& x);
LogTuple tuple_from_json(const json& j, int d, const std::string& where);

json to_json(const Clause& c);
json to_json(const CriterionReport& r);
CriterionReport report_from_json(const json& j);

// Cells keep boxes, anchors and diameter bounds; samples are refilled by
// attach_samples.
json to_json(const Schedule& s);
Schedule schedule_from_json(const json& j);

json to_json(const CandidateVector& x);

// Header plus one row per entry: k, digits, n, anchor, box lo, box hi.
std::string schedule_csv(const Schedule& s);
std::string report_csv(const CriterionReport& r);
std::string csv_field(const std::string& s);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hclab
