#include <gtest/gtest.h>

#include <cmath>

#include "bisons/adversary.hpp"
#include "bisons/bisons.hpp"
#include "bisons/comparators.hpp"
#include "bisons/error.hpp"
#include "test_util.hpp"

namespace bisons {
namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

TEST(DefaultParams, DocumentedValues) {
  const BisonsParams p = default_params(2, 440);
  EXPECT_DOUBLE_EQ(p.B, 264.0 / 5.0 * 2.0 * std::log(440.0));
  EXPECT_DOUBLE_EQ(p.eta * 4.0 * p.B, 1.0);
  EXPECT_DOUBLE_EQ(p.beta * 7.0 * p.B, 11.0);
  for (int d : {2, 3, 5, 8}) {
    for (long long T : {110LL * d * d, 10'000LL, 10'000'000LL}) {
      const BisonsParams q = default_params(d, T);
      EXPECT_DOUBLE_EQ(q.eta * 4.0 * q.B, 1.0);
      EXPECT_DOUBLE_EQ(q.beta * 7.0 * q.B, 11.0);
      EXPECT_NO_THROW(validate_params(q));
    }
  }
}

TEST(DefaultParams, RejectsShortHorizon) {
  try {
    default_params(2, 439);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kParameter);
  }
}

TEST(ValidateParams, RejectsConstraintViolations) {
  BisonsParams p = default_params(2, 1000);
  BisonsParams q = p;
  q.eta *= 2.0;
  EXPECT_THROW(validate_params(q), Error);
  q = p;
  q.beta = 0.5;
  EXPECT_THROW(validate_params(q), Error);
  q = p;
  q.B = -1.0;
  EXPECT_THROW(validate_params(q), Error);
  q = p;
  q.beta = 1e-4;  // 1/beta > T
  q.eta = 1e-6;
  EXPECT_THROW(validate_params(q), Error);
}

TEST(UpdateBias, Examples) {
  EXPECT_EQ(update_bias(v2(1, 3), Portfolio(v2(0.5, 0.5))), v2(2, 3));
  EXPECT_EQ(update_bias(v2(4, 4), Portfolio(v2(0.5, 0.5))), v2(4, 4));
  EXPECT_EQ(update_bias(Vec::Constant(3, 3.0), Portfolio::uniform(3)), Vec::Constant(3, 3.0));
  try {
    update_bias(v2(1, 1), Portfolio::vertex(2, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInteriority);
  }
}

TEST(CheckReset, InitialStateDoesNotReset) {
  const BisonsParams p = default_params(2, 440);
  EXPECT_LT(reset_scale(p.eta, p.beta), 1.0);
  EXPECT_FALSE(check_reset(Portfolio::uniform(2), Vec::Constant(2, 2.0), p));
  EXPECT_FALSE(check_reset(Portfolio(v2(1e-300, 1.0 - 1e-300)), v2(1.0, 1e-300), p));
}

TEST(CheckReset, BoundaryIsInclusive) {
  BisonsParams p = default_params(2, 440);
  // Find a beta where u p k lands on exactly 1 in floating point.
  double pk = 0.0;
  for (int j = 1; j < 1000; ++j) {
    p.beta = 0.001 * j;
    const double k = reset_scale(p.eta, p.beta);
    const double cand = 2.0 / k;
    if (k * 0.5 * cand == 1.0) {
      pk = cand;
      break;
    }
  }
  ASSERT_GT(pk, 0.0);
  const Portfolio u(v2(0.5, 0.5));
  EXPECT_TRUE(check_reset(u, v2(pk, 0.0), p));
  EXPECT_FALSE(check_reset(u, v2(std::nextafter(pk, 0.0), 0.0), p));
}

TEST(BisonsRound, FirstRoundPlaysUniform) {
  const BisonsParams p = default_params(3, 1000);
  const BisonsEpochState s = BisonsEpochState::initial(p);
  EXPECT_EQ(s.x.weights(), Portfolio::uniform(3).weights());
  EXPECT_EQ(s.u.weights(), Portfolio::uniform(3).weights());
  EXPECT_EQ(s.p, Vec::Constant(3, 3.0));
  const ReturnsVec r = normalize_returns((Vec(3) << 1, 2, 3).finished());
  const auto [next, rec] = bisons_round(s, r, p, 1, default_tolerance(1000));
  EXPECT_EQ(rec.x_played.weights(), Portfolio::uniform(3).weights());
  EXPECT_NEAR(rec.loss, std::log(3.0), 1e-15);
  EXPECT_EQ(next.tau, 2);
}

// Hand-rolled 2-asset reference: with r = (1/2, 1/2) every surrogate gradient
// is (-1, -1), orthogonal to the simplex, so both iterates stay uniform.
TEST(BisonsRound, UniformReturnsStayPut) {
  const BisonsParams p = default_params(2, 440);
  BisonsRunner run(p);
  const ReturnsVec r = normalize_returns(v2(1, 1));
  for (int t = 0; t < 100; ++t) {
    const RoundRecord rec = run.step(r);
    EXPECT_NEAR(rec.loss, std::log(2.0), 1e-14);
    EXPECT_FALSE(rec.reset_triggered);
    EXPECT_LE((rec.x_played.weights() - Vec::Constant(2, 0.5)).norm(), 1e-12);
  }
  EXPECT_LE((run.state().u.weights() - Vec::Constant(2, 0.5)).norm(), 1e-12);
}

TEST(BisonsRound, StateFunctionMatchesRunner) {
  const BisonsParams p = default_params(2, 500);
  const std::vector<ReturnsVec> rs = adversary_sequence({"iid-dirichlet", 2, 500, 3, 0.5});
  BisonsRunner run(p);
  BisonsEpochState s = BisonsEpochState::initial(p);
  for (long long t = 1; t <= 50; ++t) {
    const RoundRecord a = run.step(rs[t - 1]);
    auto [next, b] = bisons_round(s, rs[t - 1], p, t, run.tolerance());
    EXPECT_EQ(a.x_played.weights(), b.x_played.weights());
    EXPECT_EQ(a.loss, b.loss);
    s = std::move(next);
  }
}

TEST(RunBisons, EmptyAndSingleRound) {
  const BisonsParams p = default_params(2, 440);
  EXPECT_TRUE(run_bisons({}, p).rounds.empty());
  const std::vector<ReturnsVec> one = {normalize_returns(v2(3, 1))};
  const BisonsTrajectory t = run_bisons(one, p);
  ASSERT_EQ(t.rounds.size(), 1u);
  EXPECT_NEAR(t.rounds[0].loss, -std::log(0.5), 1e-15);
}

TEST(RunBisons, RejectsMoreRoundsThanHorizon) {
  const BisonsParams p = default_params(2, 440);
  const std::vector<ReturnsVec> rs(441, normalize_returns(v2(1, 1)));
  EXPECT_THROW(run_bisons(rs, p), Error);
}

TEST(RunBisons, Deterministic) {
  const BisonsParams p = default_params(3, 1000);
  const std::vector<ReturnsVec> rs = adversary_sequence({"single-asset-crash", 3, 1000, 5, 0.5});
  const BisonsTrajectory a = run_bisons(rs, p), b = run_bisons(rs, p);
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    EXPECT_EQ(a.rounds[i].x_played.weights(), b.rounds[i].x_played.weights());
  }
}

// A hard crash where the surviving asset changes: r = e1 for a while, then
// e2, with small T-relative parameters so that the reset fires early.
TEST(RunBisons, CrashTriggersReset) {
  BisonsParams p = default_params(2, 20'000);
  p.B = 0.0;
  p.beta = kMaxBeta;
  p.eta = 1.0 / 63.0;
  std::vector<ReturnsVec> rs;
  for (int t = 0; t < 20'000; ++t) rs.push_back(normalize_returns(t < 10'000 ? v2(1, 0.001) : v2(0.001, 1)));
  const BisonsTrajectory traj = run_bisons(rs, p);
  ASSERT_FALSE(traj.reset_times.empty());
  EXPECT_LT(traj.reset_times.front(), 20'000);
  const auto& after = traj.rounds[static_cast<std::size_t>(traj.reset_times.front())];
  EXPECT_EQ(after.epoch, 2);
  EXPECT_EQ(after.tau, 1);
  EXPECT_EQ(after.x_played.weights(), Portfolio::uniform(2).weights());
}

TEST(RunBisons, RegretBoundOnRandomSequences) {
  const int d = 3;
  const long long T = 1000;
  const BisonsParams p = default_params(d, T);
  const double bound = 740.0 * d * d * std::pow(std::log(1000.0), 2);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::vector<ReturnsVec> rs = adversary_sequence({"iid-dirichlet", d, T, seed, 0.5});
    const BisonsTrajectory traj = run_bisons(rs, p);
    double loss = 0.0;
    for (const RoundRecord& r : traj.rounds) loss += r.loss;
    EXPECT_LE(loss - best_crp(rs).loss, bound);
  }
}

// Per-round properties: bias monotone and dominating 1/x, stability ratios,
// comparator doubling, range and per-epoch cost of bias.
TEST(BisonsMonitor, NoViolationsOnAdversarialRuns) {
  for (const char* adv : {"iid-dirichlet", "single-asset-crash", "alternating-basis"}) {
    for (int d : {2, 4}) {
      const long long T = 110LL * d * d;
      const BisonsParams p = default_params(d, T);
      BisonsMonitor mon(p);
      const std::vector<ReturnsVec> rs = adversary_sequence({adv, d, T, 11, 0.5});
      run_bisons(rs, p, 0.0, [&](const RoundRecord& r, const BisonsRoundDetail& dt) {
        EXPECT_TRUE((dt.p_next.array() >= dt.p_cur.array()).all());
        EXPECT_TRUE((dt.p_next.array() >= dt.x_next.weights().cwiseInverse().array() - 1e-9).all());
        mon.observe(r, dt);
      });
      mon.finish();
      EXPECT_EQ(mon.total_violations(), 0) << adv << " d=" << d;
      EXPECT_EQ(mon.rounds, T);
    }
  }
}

}  // namespace
}  // namespace bisons
