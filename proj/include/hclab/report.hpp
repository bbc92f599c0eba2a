#pragma once

#include <string>
#include <vector>

namespace hclab {

enum class Status { Pass, Fail, Indeterminate, NotApplicable };

const char* to_string(Status s);
Status parse_status(const std::string& s);

// One checked inequality. margin = allowed - observed at the worst witness;
// its sign alone does not decide the status when the clause is strict.
struct Clause {
  std::string id;
  Status status = Status::NotApplicable;
  double margin = 0.0;
  std::string witness;
};

struct CriterionReport {
  std::string criterion;
  std::vector<Clause> clauses;

  // Pass iff no clause failed or stayed indeterminate.
  bool pass() const;
  const Clause* find(const std::string& id) const;
  void add(Clause c) { clauses.push_back(std::move(c)); }
};

// Helpers for building clauses from a margin.
Clause strict_clause(std::string id, double margin, std::string witness);
Clause weak_clause(std::string id, double margin, std::string witness);

}  // namespace hclab
