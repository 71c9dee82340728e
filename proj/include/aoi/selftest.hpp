#pragma once

#include <string>
#include <vector>

namespace aoi {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick cross-checks of the closed forms against brute-force routes, meant
/// for a deployed binary. The full oracle suites live in the test tree.
std::vector<SelftestCheck> run_selftest();

}  // namespace aoi
