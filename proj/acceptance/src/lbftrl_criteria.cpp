// Criteria 8 and 9: the LB-FTRL target sequence and the regret-stability
// lower bound.

#include <cmath>

#include "bisons/adversary.hpp"
#include "bisons/lbftrl.hpp"
#include "common.hpp"

namespace bisons::acceptance {

CriterionResult criterion_8() {
  Stopwatch sw;
  bool ok = true;
  std::string detail;
  for (int d = 3; d <= 8; ++d) {
    const std::vector<TargetPair> seq = build_target_sequence(d);
    const ValidityReport rep = check_sequence_validity(seq, d);
    const std::size_t expect = (std::size_t{1} << d) - 2;
    const bool good = rep.valid && seq.size() == expect && rep.length == expect;
    ok = ok && good;
    detail += " d=" + str(d) + ": " + str(seq.size()) + (good ? " ok" : " INVALID") +
              " (min cross " + rep.min_cross.str() + ");";
  }
  CriterionResult res;
  res.seconds = sw.seconds();
  res.passed = ok && res.seconds < 5.0;
  res.detail = "lengths 2^d-2 and exact inner products;" + detail;
  return res;
}

namespace {

struct Check {
  std::string label;
  double regret = 0.0;
  double bound = 0.0;
  bool passed = false;
};

Check check_run(const std::string& label, const LbftrlRun& run, double eta, long long T) {
  const double c2 = 1.0 / ((1.0 + eta) * (1.0 + eta));
  const double bound = 0.5 * c2 * run.stability_sum - 1e-6 * static_cast<double>(T);
  return {label, run.regret, bound, run.regret >= bound};
}

}  // namespace

CriterionResult criterion_9() {
  Stopwatch sw;
  std::vector<Check> checks;

  const double eta = 1.0;
  const AdversaryPlan plan = make_plan(3, 10'000, 0.5);
  const LbftrlRun bad = generate_and_run(plan, eta);
  checks.push_back(check_run("generated d=3 alpha=1/2 T=1e4", bad, eta, plan.T));

  for (double e : {1.0, 0.1}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const long long T = 1000;
      const std::vector<ReturnsVec> rs = adversary_sequence({"iid-dirichlet", 3, T, seed, 0.5});
      checks.push_back(check_run("iid-dirichlet d=3 eta=" + str(e) + " seed=" + str(seed),
                                 run_lbftrl(rs, e, T), e, T));
    }
    const std::vector<ReturnsVec> crash = adversary_sequence({"single-asset-crash", 2, 1000, 1, 0.5});
    checks.push_back(check_run("crash d=2 eta=" + str(e), run_lbftrl(crash, e, 1000), e, 1000));
  }

  int failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const Check& c : checks) {
    if (!c.passed) ++failures;
    min_margin = std::min(min_margin, c.regret - c.bound);
  }
  CriterionResult res;
  res.passed = failures == 0;
  res.detail = str(checks.size()) + " runs, " + str(failures) +
               " below the bound, smallest margin " + str(min_margin) + "; generated run: regret " +
               str(bad.regret) + " vs bound " + str(checks.front().bound) + ", " +
               str(bad.movement_steps) + " movement and " + str(bad.outcome_steps) +
               " outcome rounds" + (bad.truncated ? ", schedule truncated at T" : "");
  res.seconds = sw.seconds();
  return res;
}

}  // namespace bisons::acceptance
