#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace so3kit {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;  // observed metric and threshold
  double seconds = 0.0;
};

// Runs every invariant suite with deterministic seeds.  tolerance_scale
// multiplies each pass threshold (1 = contract values; 0 makes every suite
// fail, which exercises the harness itself).  A nonempty `only` restricts
// the run to the named suites.
std::vector<SuiteResult> run_verification_suites(double tolerance_scale = 1.0,
                                                 std::uint64_t seed = 0x5eedULL,
                                                 const std::vector<std::string>& only = {});

}  // namespace so3kit
