#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "bisons/adversary.hpp"
#include "bisons/barrier_solver.hpp"
#include "bisons/bisons.hpp"
#include "test_util.hpp"

namespace bisons {
namespace {

TEST(DefaultTolerance, MinOfConstantAndInverseSquare) {
  EXPECT_EQ(default_tolerance(10), 1e-10);
  EXPECT_EQ(default_tolerance(1'000'000), 1e-12);
}

TEST(MinimizeSimplex, PureBarrierIsUniform) {
  auto g = test::gen(1);
  for (int d = 2; d <= 6; ++d) {
    const QuadraticObjective obj(d, 3.0);
    const SimplexReport rep = minimize_simplex(obj, Portfolio(test::simplex_point(g, d)), 1e-12);
    EXPECT_LE((rep.minimizer.weights() - Vec::Constant(d, 1.0 / d)).norm(), 1e-9);
    EXPECT_LE(rep.certified_gap, 1e-12);
  }
}

TEST(MinimizeSimplex, PermutationSymmetricQuadraticIsUniform) {
  const int d = 4;
  QuadraticObjective obj(d, 0.5);
  obj.add_surrogate(Vec::Ones(d), 0.0, 0.3, 0.2);  // constant on the simplex
  obj.add_surrogate(Vec::Ones(d) * 2.0, 1.0, -1.0, 0.4);
  const SimplexReport rep = minimize_simplex(obj, Portfolio::uniform(d), 1e-12);
  EXPECT_LE((rep.minimizer.weights() - Vec::Constant(d, 0.25)).norm(), 1e-9);
}

// Grid oracle with step 1e-3 over the 2-simplex.
TEST(MinimizeSimplex, LinearPullMatchesGrid) {
  QuadraticObjective obj(3, 1.0);
  obj.add_linear((Vec(3) << -1.0, 0.0, 0.0).finished());
  obj.add_surrogate((Vec(3) << 0.1, -0.05, 0.0).finished(), 0.0, 0.0, 0.01);
  const SimplexReport rep = minimize_simplex(obj, Portfolio::uniform(3), 1e-12);
  double best = std::numeric_limits<double>::infinity();
  Vec arg(3);
  for (int i = 1; i < 1000; ++i) {
    for (int j = 1; i + j < 1000; ++j) {
      const Vec x = (Vec(3) << i * 1e-3, j * 1e-3, 1.0 - (i + j) * 1e-3).finished();
      const double v = objective_value(obj, x, Domain::kSimplex);
      if (v < best) {
        best = v;
        arg = x;
      }
    }
  }
  EXPECT_LE((rep.minimizer.weights() - arg).lpNorm<Eigen::Infinity>(), 2e-3);
  EXPECT_LE(rep.objective_value, best + 1e-12);
}

TEST(MinimizeSimplex, DescentInteriorityAndStationarity) {
  auto g = test::gen(4);
  for (int k = 0; k < 30; ++k) {
    const int d = 2 + k % 5;
    QuadraticObjective obj(d, 0.01 + test::unif(g));
    for (int s = 0; s < 3; ++s) {
      Vec a(d);
      for (int i = 0; i < d; ++i) a[i] = 3.0 * test::normal(g);
      obj.add_surrogate(a, 0.0, test::normal(g), 0.3);
    }
    obj.add_log_term(test::simplex_point(g, d), 2.0);
    SolverOptions opt;
    opt.record_trace = true;
    const double tol = 1e-10;
    const SimplexReport rep = minimize_simplex(obj, Portfolio::uniform(d), tol, opt);
    for (std::size_t i = 1; i < rep.objective_trace.size(); ++i) {
      EXPECT_LE(rep.objective_trace[i], rep.objective_trace[i - 1] + 1e-12);
    }
    EXPECT_GT(rep.minimizer.min_entry(), 1e-14);
    // Newton decrement on the tangent space, assembled from the objective's
    // parts in an independent orthonormal basis.
    const Vec& x = rep.minimizer.weights();
    const Mat b = PiProjection(d).basis();
    const Mat h = obj.smooth_hessian(x) + obj.barrier_weight() * Mat(x.array().square().inverse().matrix().asDiagonal());
    const Vec g = b * objective_gradient(obj, x, Domain::kSimplex);
    const double dec2 = g.dot((b * h * b.transpose()).ldlt().solve(g));
    EXPECT_LE(dec2, 1.01 * tol);
  }
}

TEST(MinimizeSimplex, FailureCarriesBestIterate) {
  QuadraticObjective obj(3, 1e-6);
  obj.add_linear((Vec(3) << -50.0, 0.0, 20.0).finished());
  SolverOptions opt;
  opt.max_iterations = 1;
  try {
    minimize_simplex(obj, Portfolio::uniform(3), 1e-12, opt);
    FAIL() << "expected solver failure";
  } catch (const SolverFailure& f) {
    EXPECT_EQ(f.code(), Errc::kSolverFailure);
    EXPECT_EQ(f.best_iterate().size(), 3);
    EXPECT_LT(f.best_value(), objective_value(obj, Vec::Constant(3, 1.0 / 3), Domain::kSimplex));
  }
}

TEST(MinimizeSpectraplex, PureBarrierIsMaximallyMixed) {
  auto g = test::gen(5);
  for (int d = 1; d <= 4; ++d) {
    const QuadraticObjective obj(d * d, 2.0);
    const SpectraplexReport rep = minimize_spectraplex(obj, QuantumState(test::random_state(g, d)), 1e-12);
    EXPECT_LE((rep.minimizer.matrix().matrix() - CMat::Identity(d, d) / d).cwiseAbs().maxCoeff(), 1e-9);
  }
}

// 1/2 Tr(X^2) is unitarily invariant.
TEST(MinimizeSpectraplex, UnitaryInvariantObjective) {
  const int d = 3;
  QuadraticObjective obj(d * d, 0.1);
  const Vec w = phi_inner_weights(d);
  for (int i = 0; i < d * d; ++i) {
    Vec e = Vec::Zero(d * d);
    e[i] = 1.0;
    obj.add_surrogate(e * std::sqrt(w[i]), 0.0, 0.0, 1.0);
    obj.add_linear(-e * std::sqrt(w[i]));  // cancel the surrogate's linear part
  }
  const SpectraplexReport rep = minimize_spectraplex(obj, QuantumState::maximally_mixed(d), 1e-12);
  EXPECT_LE((rep.minimizer.matrix().matrix() - CMat::Identity(d, d) / d).cwiseAbs().maxCoeff(), 1e-9);
}

// d = 2, linear term <X, diag(-1, 0)>: optimum is diagonal by symmetry, so a
// 1-D oracle over diag(a, 1-a) plus a rotation sweep confirms it.
TEST(MinimizeSpectraplex, DiagonalPullMatchesParametricOracle) {
  QuadraticObjective obj(4, 1.0);
  obj.add_linear(phi_functional(HermitianMatrix::diagonal((Vec(2) << -1.0, 0.0).finished())));
  const SpectraplexReport rep = minimize_spectraplex(obj, QuantumState::maximally_mixed(2), 1e-12);
  // 1-D: minimize -a - log a - log(1 - a) by bisection on the derivative
  auto dv = [](double a) { return -1.0 - 1.0 / a + 1.0 / (1.0 - a); };
  double lo = 1e-9, hi = 1 - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dv(mid) > 0 ? hi : lo) = mid;
  }
  const double a = 0.5 * (lo + hi);
  const CMat& x = rep.minimizer.matrix().matrix();
  EXPECT_NEAR(x(0, 0).real(), a, 1e-4);
  EXPECT_NEAR(std::abs(x(0, 1)), 0.0, 1e-4);
  // rotations of the oracle point never do better
  const double base = objective_value(obj, vectorize_phi(rep.minimizer.matrix()), Domain::kSpectraplex);
  for (int k = 0; k < 64; ++k) {
    const double th = k * 0.1;
    const Complex ph = std::polar(1.0, 0.7 * k);
    CMat u(2, 2);
    u << std::cos(th), -ph * std::sin(th), std::conj(ph) * std::sin(th), std::cos(th);
    const CMat d = (Vec(2) << a, 1 - a).finished().cast<Complex>().asDiagonal();
    const HermitianMatrix rot = make_hermitian_unchecked(u * d * u.adjoint());
    EXPECT_GE(objective_value(obj, vectorize_phi(rot), Domain::kSpectraplex), base - 1e-12);
  }
}

TEST(MinimizeSpectraplex, InteriorityAndStationarity) {
  auto g = test::gen(7);
  for (int k = 0; k < 20; ++k) {
    const int d = 2 + k % 3;
    QuadraticObjective obj(d * d, 0.05 + test::unif(g));
    for (int s = 0; s < 3; ++s) {
      obj.add_surrogate(phi_functional(test::random_hermitian(g, d)), 0.0, test::normal(g), 0.3);
    }
    const double tol = 1e-10;
    const SpectraplexReport rep = minimize_spectraplex(obj, QuantumState::maximally_mixed(d), tol);
    EXPECT_GT(rep.minimizer.matrix().min_eigenvalue(), 1e-14);
    EXPECT_LE(rep.certified_gap, tol);
    // Newton decrement on trace-free directions, with the log-det Hessian
    // built independently of the solver.
    const Vec v = vectorize_phi(rep.minimizer.matrix());
    const Mat h = obj.smooth_hessian(v) +
                  obj.barrier_weight() * logdet_hessian_phi(inverse_pd(rep.minimizer.matrix()));
    Vec a = Vec::Zero(d * d);
    a.tail(d).setOnes();
    const Mat q = Eigen::HouseholderQR<Mat>(Mat(a)).householderQ();
    const Mat b = q.rightCols(d * d - 1).transpose();
    const Vec gt = b * objective_gradient(obj, v, Domain::kSpectraplex);
    EXPECT_LE(gt.dot((b * h * b.transpose()).ldlt().solve(gt)), 1.01 * tol);
  }
}

TEST(MinimizeSimplex, WarmStartsAlongRunAreCheap) {
  const BisonsParams p = default_params(3, 1000);
  const std::vector<ReturnsVec> rs = adversary_sequence({"iid-dirichlet", 3, 1000, 9, 0.5});
  int worst = 0;
  long long t = 0;
  run_bisons(rs, p, 0.0, [&](const RoundRecord&, const BisonsRoundDetail& dt) {
    if (++t > 1) worst = std::max({worst, dt.newton_x, dt.newton_u});
  });
  EXPECT_LE(worst, 20);
}

}  // namespace
}  // namespace bisons
