#pragma once

#include <string>
#include <vector>

namespace mvm {

/// One acceptance criterion outcome; detail carries the measured numbers.
struct CriterionResult {
    std::string id;
    bool passed = false;
    std::string detail;
    double runtime_seconds = 0.0;
};

/// Ids: a1..a11 (lower case). "all" expands to every criterion.
std::vector<std::string> acceptance_ids();

CriterionResult run_criterion(const std::string& id, int threads = 0);

/// Runs the requested criteria in order, printing one PASS/FAIL line each to
/// stdout. Returns the results.
std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& ids,
                                            int threads = 0);

} // namespace mvm
