#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace robin {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  int threads = 1;
  uint64_t seed = 20240601;
};

// Runs the full verification battery; prints one pass/fail line per
// criterion to `live` as results arrive.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream* live);

nlohmann::json acceptance_to_json(const std::vector<CriterionResult>& results,
                                  const AcceptanceOptions& opts);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace robin
