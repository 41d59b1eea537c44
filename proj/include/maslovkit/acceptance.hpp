#pragma once

// End-to-end acceptance checks, one result per criterion.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace maslovkit {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 0;
  /// Criterion numbers to run; empty runs all eleven.
  std::vector<int> only;
};

inline constexpr int kCriterionCount = 11;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  name  (1.23 s)  detail".
std::string format_result(const CriterionResult& r);

}  // namespace maslovkit
