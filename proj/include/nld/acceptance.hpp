#pragma once

#include <string>
#include <vector>

namespace nld {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

/// Ids 1..12 of the acceptance suite.
std::vector<int> criterion_ids();
std::string criterion_title(int id);

/// Runs one criterion at its stated tolerances. Exceptions are caught and
/// turned into a failing result.
CriterionResult run_criterion(int id);

/// "PASS [id] title: detail (Xs)" or "FAIL ...".
std::string format_result(const CriterionResult& r);

}  // namespace nld
