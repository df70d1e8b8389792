#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughchain {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Kernel, generator, matrix-exponential and pricing property suites at the
/// reference parameter set. Fast enough to run on every build.
std::vector<CheckResult> run_selfcheck(unsigned threads = 1);

/// Prints one "PASS|FAIL name: detail" line per check; returns true when all pass.
bool report_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace roughchain
