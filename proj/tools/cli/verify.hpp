#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbc::cli {

struct SuiteResult {
  std::string name;
  bool ok = false;
  double worst = 0.0;  // largest observed deviation in the suite's own metric
  double tol = 0.0;
  std::string detail;
};

inline constexpr std::uint64_t kShippedSeed = 20240607ULL;

/// Runs every identity and property suite with seeds derived from `seed`.
std::vector<SuiteResult> run_verify_suites(std::uint64_t seed = kShippedSeed);

}  // namespace fbc::cli
