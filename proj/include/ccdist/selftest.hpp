#pragma once

#include <string>
#include <vector>

namespace ccdist {

struct SelfTestReport {
  int checks = 0;                      // total individual assertions run
  std::vector<std::string> lines;      // one status line per suite
  std::vector<std::string> failures;   // description of every failed check
  bool ok() const { return failures.empty(); }
};

// Runs the built-in invariant suites (scalar kernels, group algebra,
// reference function, geodesics, solver, closed forms, heat kernel).
// Deterministic; takes a few seconds.
SelfTestReport run_selftest();

}  // namespace ccdist
