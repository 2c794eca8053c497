#pragma once

#include <string>
#include <vector>

namespace dtvoi {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite behind `dtvoi selftest`: filter algebra, link
/// outage, scheduler bounds, determinism and CSV round-trip.
std::vector<CheckResult> run_selftest(unsigned seed = 7);

}  // namespace dtvoi
