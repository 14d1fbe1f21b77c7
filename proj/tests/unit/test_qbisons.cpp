#include <gtest/gtest.h>

#include <cmath>

#include "bisons/adversary.hpp"
#include "bisons/bisons.hpp"
#include "bisons/comparators.hpp"
#include "bisons/error.hpp"
#include "bisons/qbisons.hpp"
#include "test_util.hpp"

namespace bisons {
namespace {

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

QBisonsParams injected(const BisonsParams& p) { return {p.d, p.T, p.B, p.eta, p.beta}; }

HermitianMatrix diag_of(const Vec& v) { return HermitianMatrix::diagonal(v); }

TEST(QDefaultParams, DocumentedValues) {
  for (int d : {1, 2, 3}) {
    const long long T = 110LL * d * d * 4;
    const QBisonsParams p = q_default_params(d, T);
    EXPECT_DOUBLE_EQ(p.B, 264.0 / 5.0 * d * d * std::log(static_cast<double>(T)));
    EXPECT_DOUBLE_EQ(p.eta * 4.0 * p.B, 1.0);
    EXPECT_DOUBLE_EQ(p.beta * 7.0 * p.B, 11.0 * d);
    EXPECT_NO_THROW(q_validate_params(p));
  }
  EXPECT_THROW(q_default_params(2, 439), Error);
}

// d = 1: the spectraplex is the single point 1, so every loss is -log 1 = 0.
TEST(QDefaultParams, ScalarCaseHasZeroLoss) {
  const QBisonsParams p = q_default_params(1, 1000);
  const std::vector<HermitianMatrix> rs(1000, HermitianMatrix::identity(1));
  const QBisonsTrajectory traj = run_qbisons(rs, p);
  ASSERT_EQ(traj.rounds.size(), 1000u);
  for (const QRoundRecord& r : traj.rounds) {
    EXPECT_NEAR(r.loss, 0.0, 1e-15);
    EXPECT_NEAR(r.x_played.matrix()(0, 0).real(), 1.0, 1e-15);
  }
}

TEST(QUpdateBias, FixedPointAtCentre) {
  for (int d : {1, 2, 4}) {
    const HermitianMatrix p = HermitianMatrix::identity(d) * static_cast<double>(d);
    const HermitianMatrix x = HermitianMatrix::identity(d) * (1.0 / d);
    EXPECT_LE(max_abs((q_update_bias(p, x) - p).matrix()), 1e-12);
  }
}

TEST(QUpdateBias, DiagonalMatchesVectorRule) {
  auto g = test::gen(1);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 4;
    const Vec x = test::simplex_point(g, d);
    Vec p(d);
    for (int i = 0; i < d; ++i) p[i] = 1.0 + 20.0 * test::unif(g);
    const Vec expect = update_bias(p, Portfolio(x));
    const HermitianMatrix got = q_update_bias(diag_of(p), diag_of(x));
    for (int i = 0; i < d; ++i) EXPECT_DOUBLE_EQ(got(i, i).real(), expect[i]);
  }
}

// Dense (non-diagonal) inputs: check the Loewner postconditions and the
// inner-product identity against an eigensolver.
TEST(QUpdateBias, DensePostconditions) {
  auto g = test::gen(2);
  for (int k = 0; k < 100; ++k) {
    const int d = 3;
    const HermitianMatrix x = test::random_state(g, d);
    Vec pe(d);
    for (int i = 0; i < d; ++i) pe[i] = 0.5 + 10.0 * test::unif(g);
    const HermitianMatrix p = test::with_spectrum(g, pe);
    const HermitianMatrix pn = q_update_bias(p, x);
    EXPECT_TRUE(loewner_leq(p, pn, 1e-8));
    EXPECT_TRUE(loewner_leq(inverse_pd(x), pn, 1e-8));
    const HermitianMatrix inc = pn - p;
    const Eigen::SelfAdjointEigenSolver<CMat> es(pn.matrix());
    const CMat pn_inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().cast<Complex>().asDiagonal() *
                        es.eigenvectors().adjoint();
    const double lhs = (x.matrix() * inc.matrix()).trace().real();
    const double rhs = (pn_inv * inc.matrix()).trace().real();
    EXPECT_NEAR(lhs, rhs, 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(QCheckReset, DiagonalMatchesVectorRule) {
  auto g = test::gen(3);
  BisonsParams vp = default_params(3, 990);
  vp.beta = kMaxBeta;
  const QBisonsParams qp = injected(vp);
  int hits = 0;
  for (int k = 0; k < 400; ++k) {
    const Vec u = test::simplex_point(g, 3);
    Vec p(3);
    for (int i = 0; i < 3; ++i) p[i] = 0.5 + 3.0 * test::unif(g);
    const bool expect = check_reset(Portfolio(u), p, vp);
    hits += expect;
    EXPECT_EQ(q_check_reset(diag_of(u), diag_of(p), qp), expect);
  }
  EXPECT_GT(hits, 0);
  EXPECT_LT(hits, 400);
}

TEST(QCheckReset, SmallStateDoesNotReset) {
  const QBisonsParams p = q_default_params(3, 990);
  for (double eps : {1e-2, 1e-6, 1e-12}) {
    EXPECT_FALSE(q_check_reset(HermitianMatrix::identity(3) * eps, HermitianMatrix::identity(3) * 3.0, p));
  }
}

TEST(QCheckReset, RankOnePerturbationPastThresholdResets) {
  auto g = test::gen(4);
  QBisonsParams p = q_default_params(2, 440);
  const double pv = 5.0;
  const double thresh = 1.0 / (2.0 * (1.0 + 6.0 * p.eta) * p.beta * pv);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXcd v(2);
    v << Complex(test::normal(g), test::normal(g)), Complex(test::normal(g), test::normal(g));
    v.normalize();
    const HermitianMatrix u = HermitianMatrix::identity(2) * thresh +
                              HermitianMatrix(CMat(v * v.adjoint())) * 1e-6;
    EXPECT_TRUE(q_check_reset(u, HermitianMatrix::identity(2) * pv, p));
    const HermitianMatrix below = HermitianMatrix::identity(2) * (0.99 * thresh);
    EXPECT_FALSE(q_check_reset(below, HermitianMatrix::identity(2) * pv, p));
  }
}

TEST(QBisonsRound, FirstRoundIsMaximallyMixed) {
  const QBisonsParams p = q_default_params(3, 990);
  const QBisonsEpochState s = QBisonsEpochState::initial(p);
  const CMat centre = CMat::Identity(3, 3) / 3.0;
  EXPECT_LE(max_abs(s.x.matrix().matrix() - centre), 1e-15);
  EXPECT_LE(max_abs(s.u.matrix().matrix() - centre), 1e-15);
  EXPECT_LE(max_abs(s.p.matrix() - CMat::Identity(3, 3) * 3.0), 0.0);
  auto g = test::gen(5);
  const auto [next, rec] = qbisons_round(s, test::random_state(g, 3), p, 1, default_tolerance(990));
  EXPECT_LE(max_abs(rec.x_played.matrix().matrix() - centre), 1e-15);
  EXPECT_NEAR(rec.loss, std::log(3.0), 1e-12);
  EXPECT_EQ(next.tau, 2);
}

TEST(QBisonsRound, MaximallyMixedLossStream) {
  const QBisonsParams p = q_default_params(2, 440);
  QBisonsRunner run(p);
  for (int t = 0; t < 100; ++t) {
    const QRoundRecord rec = run.step(HermitianMatrix::identity(2) * 0.5);
    EXPECT_NEAR(rec.loss, std::log(2.0), 1e-12);
    EXPECT_FALSE(rec.reset_triggered);
  }
}

// Same diagonal stream through both algorithms with the vector parameters.
TEST(RunQBisons, DiagonalStreamMatchesVectorAlgorithm) {
  const BisonsParams vp = default_params(3, 990);
  const QBisonsParams qp = injected(vp);
  for (const char* adv : {"iid-dirichlet", "single-asset-crash"}) {
    const std::vector<ReturnsVec> rs = adversary_sequence({adv, 3, 400, 7, 0.5});
    std::vector<HermitianMatrix> ms;
    for (const ReturnsVec& r : rs) ms.push_back(diag_of(r.values()));
    const BisonsTrajectory a = run_bisons(rs, vp);
    const QBisonsTrajectory b = run_qbisons(ms, qp);
    ASSERT_EQ(a.rounds.size(), b.rounds.size());
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
      const CMat& x = b.rounds[t].x_played.matrix().matrix();
      const Vec& w = a.rounds[t].x_played.weights();
      EXPECT_LE(max_abs(x - CMat(w.cast<Complex>().asDiagonal())), 1e-6) << adv << " t=" << t;
    }
    EXPECT_EQ(a.reset_times, b.reset_times);
  }
}

TEST(RunQBisons, EmptyAndSingleMeasurement) {
  const QBisonsParams p = q_default_params(2, 440);
  EXPECT_TRUE(run_qbisons(std::span<const HermitianMatrix>{}, p).rounds.empty());
  EXPECT_TRUE(run_qbisons(std::span<const MeasurementEvent>{}, p, 1).rounds.empty());
  auto g = test::gen(6);
  const HermitianMatrix e = test::with_spectrum(g, (Vec(2) << 0.2, 0.9).finished());
  const std::vector<MeasurementEvent> one = {MeasurementEvent(e, 1.0)};
  const QBisonsTrajectory traj = run_qbisons(one, p, 1);
  ASSERT_EQ(traj.rounds.size(), 1u);
  // losses are reported on the unit-trace matrix E / Tr E
  EXPECT_NEAR(traj.rounds[0].loss, -std::log(e.trace() / 2.0) + std::log(e.trace()), 1e-12);
}

TEST(RunQBisons, SeededReductionIsDeterministic) {
  const QBisonsParams p = q_default_params(2, 440);
  const std::vector<MeasurementEvent> ev = measurement_sequence({"random-measurement", 2, 100, 3, 0.5});
  const QBisonsTrajectory a = run_qbisons(ev, p, 9), b = run_qbisons(ev, p, 9);
  for (std::size_t t = 0; t < a.rounds.size(); ++t) {
    EXPECT_EQ(a.rounds[t].x_played.matrix().matrix(), b.rounds[t].x_played.matrix().matrix());
    EXPECT_EQ(a.losses[t].matrix(), b.losses[t].matrix());
  }
}

TEST(QBisonsMonitor, NoViolationsOnRandomMeasurements) {
  for (int d : {2, 3}) {
    const long long T = 110LL * d * d;
    const QBisonsParams p = q_default_params(d, T);
    QBisonsMonitor mon(p);
    const std::vector<MeasurementEvent> ev = measurement_sequence({"random-measurement", d, T, 4, 0.5});
    run_qbisons(ev, p, 4, 0.0, [&](const QRoundRecord& r, const QBisonsRoundDetail& dt) {
      mon.observe(r, dt);
    });
    EXPECT_EQ(mon.total_violations(), 0) << "d=" << d;
    EXPECT_EQ(mon.rounds, T);
  }
}

}  // namespace
}  // namespace bisons
