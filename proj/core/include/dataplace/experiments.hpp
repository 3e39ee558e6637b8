#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dataplace {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string details;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  int threads = 0;           // <= 0: hardware concurrency, capped at 8
  std::ostream* log = nullptr;  // per-criterion progress lines when set
  // Run only these criterion ids when nonempty.
  std::vector<int> only;
};

// The acceptance suite: every numbered criterion as a deterministic
// experiment with its thresholds pinned in code. Returns one result per
// criterion, in order.
std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& opts);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace dataplace
