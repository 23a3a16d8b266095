#pragma once

// Built-in invariant checks behind `polylat selftest`.

#include <string>
#include <vector>

#include <json.hpp>

namespace polylat {

struct SelftestCheck {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Small, fast instances of the invariants of every module.
std::vector<SelftestCheck> run_selftest();

/// Kernel constants for alpha = 2..max_alpha, exact (as fractions) and rounded.
nlohmann::json constants_report(int max_alpha = 4);

}  // namespace polylat
