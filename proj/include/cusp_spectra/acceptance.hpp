#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cusp {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

// Runs the acceptance criteria (all of them when `only` is empty), printing
// one pass/fail line per criterion to os. work_dir holds experiment outputs.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only,
                                            std::ostream& os,
                                            const std::string& work_dir);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace cusp
