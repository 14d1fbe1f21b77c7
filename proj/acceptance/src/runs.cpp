// Criteria 2, 3, 5 and 6: full BISONS / qBISONS runs. Every run feeds its
// monitor counters into the session tally reported by criterion 7.

#include <algorithm>
#include <cmath>
#include <map>

#include "bisons/adversary.hpp"
#include "bisons/bisons.hpp"
#include "bisons/comparators.hpp"
#include "bisons/qbisons.hpp"
#include "bisons/rng.hpp"
#include "common.hpp"

namespace bisons::acceptance {

namespace {

void record(MonitorTally& tally, const std::string& label, const BisonsMonitor& m) {
  ++tally.runs;
  tally.rounds += m.rounds;
  tally.violations += m.total_violations();
  if (m.total_violations() > 0 && tally.first_violation.empty()) {
    tally.first_violation =
        label + " (stability " + str(m.stability_violations) + ", growth " +
        str(m.bias_growth_violations) + ", doubling " + str(m.doubling_violations) + ", range " +
        str(m.range_violations) + ", dominance " + str(m.dominance_violations) + ", cost " +
        str(m.cost_violations) + ")";
  }
}

void record(MonitorTally& tally, const std::string& label, const QBisonsMonitor& m) {
  ++tally.runs;
  tally.rounds += m.rounds;
  tally.violations += m.total_violations();
  if (m.total_violations() > 0 && tally.first_violation.empty()) {
    tally.first_violation =
        label + " (stability " + str(m.stability_violations) + ", growth " +
        str(m.bias_growth_violations) + ", doubling " + str(m.doubling_violations) + ", range " +
        str(m.range_violations) + ", dominance " + str(m.dominance_violations) + ", increment " +
        str(m.increment_violations) + ", comparator " + str(m.comparator_violations) + ")";
  }
}

double total_loss(const BisonsTrajectory& traj) {
  double s = 0.0;
  for (const RoundRecord& r : traj.rounds) s += r.loss;
  return s;
}

}  // namespace

CriterionResult criterion_2(MonitorTally& tally) {
  Stopwatch sw;
  double worst_ratio = -std::numeric_limits<double>::infinity();
  std::string worst_run;
  int runs = 0, failures = 0, resets = 0;
  for (int d : {2, 3, 5}) {
    const long long T = std::max<long long>(110LL * d * d, 1000);
    const BisonsParams p = default_params(d, T);
    const double lt = std::log(static_cast<double>(T));
    const double bound = 740.0 * d * d * lt * lt;
    for (const char* adv : {"iid-dirichlet", "single-asset-crash"}) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::vector<ReturnsVec> rs = adversary_sequence({adv, d, T, seed, 0.5});
        BisonsMonitor mon(p);
        const BisonsTrajectory traj = run_bisons(
            rs, p, 0.0, [&](const RoundRecord& r, const BisonsRoundDetail& dt) { mon.observe(r, dt); });
        mon.finish();
        const std::string label = std::string(adv) + " d=" + str(d) + " seed=" + str(seed);
        record(tally, label, mon);
        const double regret = total_loss(traj) - best_crp(rs).loss;
        ++runs;
        resets += traj.completed_epochs;
        if (regret > bound) ++failures;
        if (regret / bound > worst_ratio) {
          worst_ratio = regret / bound;
          worst_run = label + " regret " + str(regret);
        }
      }
    }
  }
  CriterionResult res;
  res.seconds = sw.seconds();
  res.passed = failures == 0 && res.seconds < 600.0;
  res.detail = str(runs) + " runs, " + str(failures) + " above 740 d^2 ln^2 T; largest regret/bound " +
               str(worst_ratio) + " (" + worst_run + "); " + str(resets) + " resets";
  return res;
}

CriterionResult criterion_3(MonitorTally& tally) {
  Stopwatch sw;
  const int d = 2;
  const long long T = 10'000'000;
  const BisonsParams p = default_params(d, T);

  // One run per choice of crashing asset.
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; seeds.size() < 2; ++s) {
    const int a = crash_asset({"single-asset-crash", d, T, s, 0.5});
    if (seeds.empty() || crash_asset({"single-asset-crash", d, T, seeds[0], 0.5}) != a) seeds.push_back(s);
  }

  int epochs = 0;
  double worst = -std::numeric_limits<double>::infinity();
  std::string notes;
  for (std::uint64_t seed : seeds) {
    const AdversarySpec spec{"single-asset-crash", d, T, seed, 0.5};
    BisonsRunner runner(p);
    BisonsMonitor mon(p);
    BisonsRoundDetail dt;
    std::map<std::vector<double>, long long> counts;  // distinct returns of the epoch
    double epoch_loss = 0.0;
    long long reset_at = 0;
    for (long long t = 1; t <= T; ++t) {
      const ReturnsVec r = adversary_returns(spec, t);
      const RoundRecord rec = runner.step(r, &dt);
      mon.observe(rec, dt);
      epoch_loss += rec.loss;
      ++counts[{r.values().data(), r.values().data() + d}];
      if (rec.reset_triggered) {
        reset_at = t;
        break;  // the first completed epoch
      }
    }
    mon.finish();
    record(tally, "crash d=2 T=1e7 seed=" + str(seed), mon);
    if (reset_at == 0) {
      notes += " seed " + str(seed) + ": no reset in " + str(T) + " rounds;";
      continue;
    }
    ++epochs;
    double run_worst = -std::numeric_limits<double>::infinity();
    const double lo = 1.0 / static_cast<double>(T);
    for (int j = 0; j < 200; ++j) {
      const double s = lo + (1.0 - 2.0 * lo) * j / 199.0;
      double comp = 0.0;
      for (const auto& [r, n] : counts) comp -= static_cast<double>(n) * std::log(s * r[0] + (1.0 - s) * r[1]);
      run_worst = std::max(run_worst, epoch_loss - comp);
    }
    worst = std::max(worst, run_worst);
    notes += " seed " + str(seed) + ": reset at t=" + std::to_string(reset_at) +
             ", max epoch regret " + str(run_worst) + ";";
  }
  CriterionResult res;
  res.passed = epochs == static_cast<int>(seeds.size()) && worst <= 1e-6;
  res.detail = str(epochs) + " completed epochs, max grid epoch regret " + str(worst) + ";" + notes;
  res.seconds = sw.seconds();
  return res;
}

CriterionResult criterion_5(MonitorTally& tally) {
  Stopwatch sw;
  const int d = 3;
  const long long T = 990;
  const BisonsParams bp = default_params(d, T);
  QBisonsParams qp;
  qp.d = d;
  qp.T = T;
  qp.B = bp.B;
  qp.eta = bp.eta;
  qp.beta = bp.beta;

  double worst = 0.0;
  int streams = 0, reset_mismatch = 0, resets = 0;
  for (const char* adv : {"iid-dirichlet", "single-asset-crash", "alternating-basis"}) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      const std::vector<ReturnsVec> rs = adversary_sequence({adv, d, T, seed, 0.5});
      std::vector<HermitianMatrix> ms;
      for (const ReturnsVec& r : rs) ms.push_back(HermitianMatrix::diagonal(r.values()));
      BisonsMonitor bm(bp);
      QBisonsMonitor qm(qp);
      const BisonsTrajectory bt = run_bisons(
          rs, bp, 0.0, [&](const RoundRecord& r, const BisonsRoundDetail& dt) { bm.observe(r, dt); });
      bm.finish();
      const QBisonsTrajectory qt = run_qbisons(
          std::span<const HermitianMatrix>(ms), qp, 0.0,
          [&](const QRoundRecord& r, const QBisonsRoundDetail& dt) { qm.observe(r, dt); });
      const std::string label = std::string(adv) + " d=3 seed=" + str(seed);
      record(tally, "bisons " + label, bm);
      record(tally, "qbisons " + label, qm);
      for (std::size_t t = 0; t < bt.rounds.size(); ++t) {
        const CMat diff = qt.rounds[t].x_played.matrix().matrix() -
                          bt.rounds[t].x_played.weights().cast<Complex>().asDiagonal().toDenseMatrix();
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
      }
      if (bt.reset_times != qt.reset_times) ++reset_mismatch;
      resets += static_cast<int>(bt.reset_times.size());
      ++streams;
    }
  }
  CriterionResult res;
  res.passed = worst <= 1e-6 && reset_mismatch == 0;
  res.detail = str(streams) + " streams, max entrywise iterate difference " + str(worst) + ", " +
               str(reset_mismatch) + " reset-time mismatches (" + str(resets) + " resets)";
  res.seconds = sw.seconds();
  return res;
}

CriterionResult criterion_6(MonitorTally& tally) {
  Stopwatch sw;
  const int d = 2;
  const long long T = 440;
  const QBisonsParams p = q_default_params(d, T);
  const double lt = std::log(static_cast<double>(T));
  const double bound = 740.0 * d * d * d * lt * lt;
  double worst = -std::numeric_limits<double>::infinity();
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::vector<MeasurementEvent> evs =
        measurement_sequence({"random-measurement", d, T, seed, 0.5});
    QBisonsMonitor mon(p);
    const QBisonsTrajectory traj =
        run_qbisons(std::span<const MeasurementEvent>(evs), p, seed, 0.0,
                    [&](const QRoundRecord& r, const QBisonsRoundDetail& dt) { mon.observe(r, dt); });
    record(tally, "random-measurement d=2 seed=" + str(seed), mon);
    double loss = 0.0;
    for (const QRoundRecord& r : traj.rounds) loss += r.loss;
    const double regret = loss - best_quantum_state(traj.losses).loss;
    if (regret > bound) ++failures;
    worst = std::max(worst, regret);
  }
  CriterionResult res;
  res.passed = failures == 0;
  res.detail = "20 streams, " + str(failures) + " above 740 d^3 ln^2 T = " + str(bound) +
               "; largest regret " + str(worst);
  res.seconds = sw.seconds();
  return res;
}

}  // namespace bisons::acceptance
