#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bilevel {

// One verification criterion of the release gate. Each runs self-contained
// with pinned tolerances and reports pass/fail plus a measurement summary.
struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  std::string id;
  std::string summary;
  std::function<CriterionResult()> run;
};

const std::vector<Criterion>& acceptance_criteria();

// Runs every criterion whose id contains the filter (all when empty).
std::vector<CriterionResult> run_acceptance(const std::string& filter = "");

}  // namespace bilevel
