#include "hclab/report.hpp"

#include "hclab/errors.hpp"

namespace hclab {

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Indeterminate: return "indeterminate";
    case Status::NotApplicable: return "not-applicable";
  }
  return "?";
}

Status parse_status(const std::string& s) {
  for (auto k : {Status::Pass, Status::Fail, Status::Indeterminate, Status::NotApplicable})
    if (s == to_string(k)) return k;
  fail(ErrorKind::Invalid, "unknown clause status '" + s + "'");
}

bool CriterionReport::pass() const {
  for (const auto& c : clauses)
    if (c.status == Status::Fail || c.status == Status::Indeterminate) return false;
  return true;
}

const Clause* CriterionReport::find(const std::string& id) const {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

Clause strict_clause(std::string id, double margin, std::string witness) {
  return {std::move(id), margin > 0.0 ? Status::Pass : Status::Fail, margin, std::move(witness)};
}

Clause weak_clause(std::string id, double margin, std::string witness) {
  return {std::move(id), margin >= 0.0 ? Status::Pass : Status::Fail, margin, std::move(witness)};
}

}  // namespace hclab
