#include <gtest/gtest.h>

#include <cmath>

#include "bisons/comparators.hpp"
#include "bisons/error.hpp"
#include "bisons/geometry.hpp"
#include "test_util.hpp"

namespace bisons {
namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::kNumeric;
}

TEST(NormalizeReturns, Examples) {
  EXPECT_EQ(normalize_returns(v2(2, 2)).values(), v2(0.5, 0.5));
  EXPECT_EQ(normalize_returns(v3(1, 0, 0)).values(), v3(1, 0, 0));
  const Vec r = normalize_returns(v2(3, 1)).values();
  EXPECT_DOUBLE_EQ(r[0], 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(r[1], 1.0 / 4.0);
}

TEST(NormalizeReturns, RejectsInvalidRows) {
  EXPECT_EQ(code_of([] { normalize_returns(v2(0, 0)); }), Errc::kInvalidReturns);
  EXPECT_EQ(code_of([] { normalize_returns(v2(-1, 2)); }), Errc::kInvalidReturns);
  EXPECT_EQ(code_of([] { normalize_returns(v2(NAN, 1)); }), Errc::kInvalidReturns);
}

TEST(NormalizeReturns, SumsToOne) {
  auto g = test::gen(1);
  for (int k = 0; k < 100; ++k) {
    Vec raw(4);
    for (int i = 0; i < 4; ++i) raw[i] = 100.0 * test::unif(g);
    EXPECT_NEAR(normalize_returns(raw).values().sum(), 1.0, 1e-12);
  }
}

TEST(Portfolio, Invariants) {
  EXPECT_NO_THROW(Portfolio(v2(0.25, 0.75)));
  EXPECT_THROW(Portfolio(v2(0.5, 0.6)), Error);
  EXPECT_THROW(Portfolio(v2(-0.1, 1.1)), Error);
  EXPECT_THROW(Portfolio(Vec::Ones(1)), Error);
  EXPECT_EQ(Portfolio::uniform(4).weights(), Vec::Constant(4, 0.25));
  EXPECT_EQ(Portfolio::vertex(3, 1).weights(), v3(0, 1, 0));
}

TEST(LogLoss, Examples) {
  EXPECT_DOUBLE_EQ(log_loss(Portfolio(v2(0.5, 0.5)), normalize_returns(v2(1, 0))), std::log(2.0));
  EXPECT_NEAR(log_loss(Portfolio::uniform(4), normalize_returns(Vec::Ones(4))), std::log(4.0),
              1e-15);
  EXPECT_DOUBLE_EQ(log_loss(Portfolio(v2(0.2, 0.8)), normalize_returns(v2(0.5, 0.5))),
                   std::log(2.0));
}

TEST(LogLoss, InfiniteLossIsAnError) {
  EXPECT_EQ(code_of([] { log_loss(Portfolio::vertex(2, 0), normalize_returns(v2(0, 1))); }),
            Errc::kInfiniteLoss);
}

TEST(LogLoss, FiniteDifferenceGradient) {
  auto g = test::gen(2);
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 4;
    const Vec x = test::simplex_point(g, d), r = test::simplex_point(g, d);
    const Vec grad = log_loss_gradient(x, r);
    for (int i = 0; i < d; ++i) {
      const double h = 1e-6;
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (-std::log(xp.dot(r)) + std::log(xm.dot(r))) / (2 * h);
      EXPECT_NEAR(fd, grad[i], 1e-6 * std::abs(grad[i]));
    }
  }
}

TEST(Surrogate, PaperExample) {
  const SurrogateQuad s = build_surrogate(Portfolio(v2(0.5, 0.5)), normalize_returns(v2(1, 0)), 0.1);
  EXPECT_EQ(s.anchor_grad, v2(-2, 0));
  EXPECT_NEAR(s.eval(Portfolio(v2(0.25, 0.75))), std::log(2.0) + 0.5 + 0.0125, 1e-15);
}

TEST(Surrogate, AnchorIdentities) {
  auto g = test::gen(3);
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 4;
    const Portfolio xt(test::simplex_point(g, d));
    const ReturnsVec r = normalize_returns(test::simplex_point(g, d));
    const SurrogateQuad s = build_surrogate(xt, r, 0.2);
    EXPECT_NEAR(s.eval(xt), log_loss(xt, r), 1e-15);
    const Vec expect = -r.values() / xt.weights().dot(r.values());
    EXPECT_LE((s.anchor_grad - expect).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((s.gradient(xt.weights()) - expect).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Surrogate, RejectsBetaOutsideRange) {
  EXPECT_EQ(code_of([] { validate_beta(0.0); }), Errc::kParameter);
  EXPECT_EQ(code_of([] { validate_beta(0.5); }), Errc::kParameter);
  EXPECT_NO_THROW(validate_beta(kMaxBeta));
}

TEST(Surrogate, ConvexAlongSegments) {
  auto g = test::gen(4);
  for (int k = 0; k < 50; ++k) {
    const int d = 3;
    const SurrogateQuad s = build_surrogate(Portfolio(test::simplex_point(g, d)),
                                            normalize_returns(test::simplex_point(g, d)), 0.3);
    const Vec a = test::simplex_point(g, d), b = test::simplex_point(g, d);
    for (int j = 1; j < 20; ++j) {
      const double t = j / 20.0, h = 1.0 / 40.0;
      auto at = [&](double u) { return s.eval(Vec((1 - u) * a + u * b)); };
      EXPECT_GE(at(t + h) - 2 * at(t) + at(t - h), -1e-10);
    }
  }
}

// Dense 1-D sweep of the three profiles h, hhat and its lower extension.
TEST(LowerSurrogate, ProfileSweep) {
  for (double beta : {0.05, 0.2, kMaxBeta}) {
    for (double y : {0.01, 0.3, 1.0}) {
      for (int j = 1; j <= 2000; ++j) {
        const double l = y / beta * 3.0 * j / 2000.0;
        const double low = lower_surrogate_profile(y, beta, l);
        const double hhat = surrogate_profile(y, beta, l);
        EXPECT_LE(low, hhat + 1e-12);
        EXPECT_LE(low, -std::log(l) + 1e-12);
        if (l <= y / beta) {
          EXPECT_EQ(low, hhat);
        }
      }
    }
  }
}

TEST(LowerSurrogate, MatchesSurrogateBelowKinkAndEqualityAtAnchor) {
  auto g = test::gen(5);
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 3;
    const Portfolio xt(test::simplex_point(g, d));
    const ReturnsVec r = normalize_returns(test::simplex_point(g, d));
    const double beta = 0.1;
    const SurrogateQuad s = build_surrogate(xt, r, beta);
    const Portfolio x(test::simplex_point(g, d));
    const double low = lower_surrogate_eval(s, x, r);
    if (x.weights().dot(r.values()) <= s.anchor_reward / beta) {
      EXPECT_EQ(low, s.eval(x));
    }
    EXPECT_LE(low, log_loss(x, r) + 1e-12);
    EXPECT_NEAR(lower_surrogate_eval(s, xt, r), log_loss(xt, r), 1e-15);
  }
}

TEST(PiProjection, BasisInvariants) {
  for (int d = 2; d <= 8; ++d) {
    const PiProjection p(d);
    const Mat& b = p.basis();
    EXPECT_LE((b * b.transpose() - Mat::Identity(d - 1, d - 1)).norm(), 1e-10);
    EXPECT_LE((b * p.center()).norm(), 1e-12);
    EXPECT_LE(p.project(Vec(p.center())).norm(), 1e-12);
    EXPECT_EQ(p.lift(Vec::Zero(d - 1)), p.center());
  }
}

TEST(PiProjection, RoundTrip) {
  auto g = test::gen(6);
  const PiProjection p(5);
  for (int k = 0; k < 100; ++k) {
    const Vec x = test::simplex_point(g, 5);
    EXPECT_LE((p.lift(p.project(x)) - x).lpNorm<Eigen::Infinity>(), 1e-10);
  }
  Vec far = Vec::Zero(4);
  far[0] = 10.0;
  EXPECT_FALSE(p.lift_checked(far).in_simplex);
  EXPECT_TRUE(p.lift_checked(Vec::Zero(4)).in_simplex);
}

// Rescaling individual rounds shifts each loss by a constant, so the best
// constant rebalanced portfolio does not move.
TEST(NormalizeReturns, PreservesBestCrp) {
  auto g = test::gen(7);
  std::vector<ReturnsVec> a, b;
  for (int t = 0; t < 30; ++t) {
    const Vec raw = test::simplex_point(g, 3);
    a.push_back(normalize_returns(raw));
    b.push_back(normalize_returns(Vec(raw * (0.1 + 10.0 * test::unif(g)))));
  }
  EXPECT_LE((best_crp(a).portfolio.weights() - best_crp(b).portfolio.weights()).norm(), 1e-6);
}

}  // namespace
}  // namespace bisons
