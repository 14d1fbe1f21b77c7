#pragma once

// Acceptance criteria 1-11. Each criterion is a self-contained experiment that
// returns pass/fail with a one-line detail; suites group them for the CLI.

#include <map>
#include <string>
#include <vector>

namespace bisons::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Monitor tallies collected by the BISONS / qBISONS runs of criteria 2, 3,
/// 5 and 6; criterion 7 reports them.
struct MonitorTally {
  long long runs = 0;
  long long rounds = 0;
  long long violations = 0;
  std::string first_violation;
};

/// Runs criteria on demand and caches their results. Criterion 7 runs the
/// criteria it depends on if they have not run yet.
class Session {
 public:
  const CriterionResult& run(int id);
  const MonitorTally& tally() const { return tally_; }

 private:
  std::map<int, CriterionResult> done_;
  MonitorTally tally_;
};

inline constexpr int kCriterionCount = 11;

/// Criteria of a suite: lemmas, bisons, qbisons, lbftrl or all.
/// Throws bisons::Error (kInvalidArgument) on an unknown suite.
std::vector<int> suite_criteria(const std::string& suite);

/// "[PASS] criterion 3: <title> (<seconds> s) <detail>"
std::string format_result(const CriterionResult& r);

}  // namespace bisons::acceptance
