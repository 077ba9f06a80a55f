#pragma once

#include "resonance_atlas/parallel.hpp"

#include <functional>
#include <string>
#include <vector>

namespace resonance_atlas {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Criteria to run (1..11); all of them when empty.
  std::vector<int> only;
  Execution exec = Execution::parallel;
};

constexpr int acceptance_criterion_count = 11;

/// Runs the criteria in increasing order.  Exceptions inside a criterion turn
/// into a FAIL with the message as detail.  `on_result` sees each result as
/// soon as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [id] title: detail (seconds s)"
std::string format_result(const CriterionResult& r);

} // namespace resonance_atlas
