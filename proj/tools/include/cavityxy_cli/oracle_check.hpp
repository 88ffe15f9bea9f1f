#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cavityxy::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Mean-field models against exact Dicke and master-equation evolution, plus the analytic
// limits of the exact solvers themselves.
std::vector<CheckResult> run_oracle_checks(unsigned threads = 1);

// One "PASS name: detail" or "FAIL name: detail" line per check; true when all pass.
bool report_checks(std::ostream& os, const std::vector<CheckResult>& checks);

}  // namespace cavityxy::cli
