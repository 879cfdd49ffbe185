#pragma once

#include <string>
#include <vector>

namespace lifschitz {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Fast invariant suite behind the `check` experiment (well under a minute).
std::vector<CheckResult> invariant_suite(int workers);

}  // namespace lifschitz
