// Acceptance gate: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion. Nonzero exit on any failure.
#include <cstdio>
#include <string>

#include "bilevel/acceptance.hpp"

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  const auto results = bilevel::run_acceptance(filter);
  if (results.empty()) {
    std::fprintf(stderr, "no criterion matches '%s'\n", filter.c_str());
    return 2;
  }
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("[%s] %-16s (%.2fs) %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                r.seconds, r.detail.c_str());
  }
  std::printf("%zu criteria, %s\n", results.size(), all ? "all passed" : "FAILURES");
  return all ? 0 : 1;
}
