// Criteria 1, 4, 10 and 11: pointwise lemmas, calculus and solver oracles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "bisons/barrier_solver.hpp"
#include "bisons/bisons.hpp"
#include "bisons/comparators.hpp"
#include "bisons/qbisons.hpp"
#include "bisons/rng.hpp"
#include "common.hpp"

namespace bisons::acceptance {

namespace {

// Dirichlet(a, ..., a) through normalized Gamma-like draws: exponentials
// raised to 1/a give a spread of interior and near-vertex points.
Vec spread_point(std::mt19937_64& g, int d) {
  const double power = 1.0 + 4.0 * rng::uniform01(g);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = std::pow(rng::exponential(g), power) + 1e-12;
  return v / v.sum();
}

double direct_loss(const Vec& x, const Vec& r) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] * r[i];
  return -std::log(s);
}

}  // namespace

CriterionResult criterion_1() {
  Stopwatch sw;
  std::mt19937_64 g = test_stream("acceptance.lower-surrogate");
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_eq = 0.0;
  long long beyond_kink = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const int d = 2 + static_cast<int>(g() % 4);
    const double beta = kMaxBeta * rng::uniform01_open_low(g);
    const Portfolio xt = Portfolio::from_solver(spread_point(g, d));
    const ReturnsVec r = normalize_returns(spread_point(g, d));
    const Portfolio x = Portfolio::from_solver(spread_point(g, d));
    const SurrogateQuad s = build_surrogate(xt, r, beta);

    const double lower = lower_surrogate_eval(s, x, r);
    worst_excess = std::max(worst_excess, lower - direct_loss(x.weights(), r.values()));
    if (x.weights().dot(r.values()) > s.anchor_reward / beta) ++beyond_kink;

    // A point with <x, r> = y_t: move x_t inside {sum = 1, <., r> = const}.
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = rng::standard_normal(g);
    const Vec ones = Vec::Ones(d);
    Mat basis(d, 2);
    basis << ones, r.values();
    const Eigen::HouseholderQR<Mat> qr(basis);
    const Mat q = qr.householderQ() * Mat::Identity(d, 2);
    v -= q * (q.transpose() * v);
    double lo = -1e300, hi = 1e300;
    for (int i = 0; i < d; ++i) {
      if (v[i] > 1e-14) lo = std::max(lo, -xt[i] / v[i]);
      if (v[i] < -1e-14) hi = std::min(hi, -xt[i] / v[i]);
    }
    double step = 0.0;
    if (lo < hi && std::isfinite(lo) && std::isfinite(hi) && lo > -1e299 && hi < 1e299) {
      step = 0.999 * (lo + (hi - lo) * rng::uniform01(g));
    }
    Vec xe = xt.weights() + step * v;
    xe = xe.cwiseMax(0.0);
    const Portfolio xeq = Portfolio::from_solver(xe);
    const double gap = std::abs(lower_surrogate_eval(s, xeq, r) -
                                direct_loss(xeq.weights(), r.values()));
    worst_eq = std::max(worst_eq, gap);
  }
  CriterionResult res;
  res.seconds = sw.seconds();
  res.passed = worst_excess <= 1e-12 && worst_eq <= 1e-12 && res.seconds < 10.0;
  res.detail = str(n) + " triples, max(lower - loss) = " + str(worst_excess) +
               ", max equality gap = " + str(worst_eq) + ", " + str(beyond_kink) +
               " beyond the kink";
  return res;
}

CriterionResult criterion_4() {
  Stopwatch sw;
  std::mt19937_64 g = test_stream("acceptance.p-update");
  double worst_mono = 0.0, worst_dom = 0.0, worst_cost = 0.0;
  long long diag_cases = 0, diag_mismatch = 0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    const int d = 1 + static_cast<int>(g() % 4);
    const bool diagonal = k % 4 == 0;
    Vec xe = log_uniform_spectrum(g, d, 0.05, 1.0);
    xe /= xe.sum();
    if (d >= 2) xe = Portfolio::from_solver(xe).weights();
    const Vec pe = log_uniform_spectrum(g, d, 0.5, 20.0);
    const HermitianMatrix x =
        diagonal ? HermitianMatrix::diagonal(xe) : random_with_spectrum(g, xe);
    const HermitianMatrix p =
        diagonal ? HermitianMatrix::diagonal(pe) : random_with_spectrum(g, pe);
    const HermitianMatrix pn = q_update_bias(p, x);
    const HermitianMatrix inc = pn - p;
    worst_mono = std::min(worst_mono, inc.min_eigenvalue());
    worst_dom = std::min(worst_dom, (pn - inverse_pd(x)).min_eigenvalue());
    const double lhs = trace_inner(x, inc);
    const double rhs = trace_inner(inverse_pd(pn), inc);
    worst_cost = std::max(worst_cost, std::abs(lhs - rhs));
    if (diagonal && d >= 2) {
      ++diag_cases;
      const Vec expect = update_bias(pe, Portfolio(xe));
      const Vec got = pn.matrix().diagonal().real();
      bool offdiag_zero = true;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          if (i != j && pn(i, j) != Complex(0.0, 0.0)) offdiag_zero = false;
        }
      }
      if (!offdiag_zero || got != expect) ++diag_mismatch;
    }
  }
  CriterionResult res;
  res.passed = worst_mono >= -1e-8 && worst_dom >= -1e-8 && worst_cost <= 1e-8 &&
               diag_mismatch == 0;
  res.detail = str(n) + " pairs, min eig(P'-P) = " + str(worst_mono) +
               ", min eig(P'-X^-1) = " + str(worst_dom) + ", cost identity error " +
               str(worst_cost) + ", diagonal mismatches " + str(diag_mismatch) + "/" +
               str(diag_cases);
  res.seconds = sw.seconds();
  return res;
}

namespace {

// Unit Frobenius-norm Hermitian direction with zero trace.
HermitianMatrix trace_free_direction(std::mt19937_64& g, int d) {
  HermitianMatrix h = random_hermitian(g, d);
  h = h - HermitianMatrix::identity(d) * (h.trace() / d);
  return h * (1.0 / h.matrix().norm());
}

HermitianMatrix random_state(std::mt19937_64& g, int d, double lo) {
  Vec e = log_uniform_spectrum(g, d, lo, 1.0);
  return random_with_spectrum(g, e / e.sum());
}

double rel_err(double approx, double exact, double scale) {
  return std::abs(approx - exact) / std::max(std::abs(exact), scale);
}

}  // namespace

CriterionResult criterion_10() {
  Stopwatch sw;
  std::mt19937_64 g = test_stream("acceptance.calculus");
  double grad_f = 0.0, grad_ld = 0.0, hess_f = 0.0, hess_ld = 0.0;
  const int n = 200;
  for (int k = 0; k < n; ++k) {
    const int d = 2 + static_cast<int>(g() % 3);
    const HermitianMatrix x = random_state(g, d, 0.1);
    const HermitianMatrix rm = random_state(g, d, 0.01);
    const HermitianMatrix dir = trace_free_direction(g, d);
    const Vec xv = vectorize_phi(x), dv = vectorize_phi(dir);

    // f(X) = -log <X, R> through the objective machinery
    QuadraticObjective obj(d * d, 1.0);
    obj.add_log_term(phi_functional(rm));
    auto f = [&](double h) { return -std::log(trace_inner(x + dir * h, rm)); };
    auto ld = [&](double h) { return -log_det(x + dir * h); };

    const double h1 = 1e-6;
    const double fd_f = (f(h1) - f(-h1)) / (2 * h1);
    const double an_f = -trace_inner(dir, rm) / trace_inner(x, rm);
    const double lib_f = obj.smooth_gradient(xv).dot(dv);
    // errors are relative to max(|exact|, 1e-3 |gradient|)
    const double scale_f = rm.matrix().norm() / trace_inner(x, rm);
    grad_f = std::max(
        {grad_f, rel_err(fd_f, an_f, 1e-3 * scale_f), rel_err(lib_f, an_f, 1e-3 * scale_f)});

    const HermitianMatrix xinv = inverse_pd(x);
    const double fd_ld = (ld(h1) - ld(-h1)) / (2 * h1);
    const double an_ld = -trace_inner(dir, xinv);
    grad_ld = std::max(grad_ld, rel_err(fd_ld, an_ld, 1e-3 * xinv.matrix().norm()));

    const double h2 = 1e-4;
    const double fd2_f = (f(h2) - 2 * f(0) + f(-h2)) / (h2 * h2);
    const double lib2_f = dv.dot(obj.smooth_hessian(xv) * dv);
    hess_f = std::max(hess_f, rel_err(fd2_f, lib2_f, 1e-3 * scale_f * scale_f));

    const double fd2_ld = (ld(h2) - 2 * ld(0) + ld(-h2)) / (h2 * h2);
    const double lib2_ld = dv.dot(logdet_hessian_phi(xinv) * dv);
    hess_ld = std::max(hess_ld, rel_err(fd2_ld, lib2_ld, 1e-3 * xinv.matrix().squaredNorm()));
  }

  // Tr(D X^-1 D X^-1) >= ||D||_F^2 whenever Tr X <= 1.
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const int d = 1 + static_cast<int>(g() % 4);
    Vec e = log_uniform_spectrum(g, d, 1e-3, 1.0);
    e *= rng::uniform01_open_low(g) / e.sum();
    const HermitianMatrix x = random_with_spectrum(g, e);
    const HermitianMatrix dir = random_hermitian(g, d);
    const Vec dv = vectorize_phi(dir);
    const double q = dv.dot(logdet_hessian_phi(inverse_pd(x)) * dv);
    worst_ratio = std::min(worst_ratio, q / dir.matrix().squaredNorm());
  }
  CriterionResult res;
  res.passed = grad_f <= 1e-5 && grad_ld <= 1e-5 && hess_f <= 1e-4 && hess_ld <= 1e-4 &&
               worst_ratio >= 1.0 - 1e-12;
  res.detail = "gradient rel err f " + str(grad_f) + ", -logdet " + str(grad_ld) +
               "; Hessian rel err f " + str(hess_f) + ", -logdet " + str(hess_ld) +
               "; min Tr(DX^-1DX^-1)/|D|^2 = " + str(worst_ratio);
  res.seconds = sw.seconds();
  return res;
}

namespace {

// Objective evaluated straight from its coefficients.
double oracle_value(const QuadraticObjective& obj, const Vec& v, double barrier) {
  double s = obj.constant() + obj.lin().dot(v) + 0.5 * v.dot(obj.quad() * v);
  for (std::size_t i = 0; i < obj.log_term_count(); ++i) {
    const double a = obj.log_functionals()[i].dot(v);
    if (a <= 0.0) return std::numeric_limits<double>::infinity();
    s -= obj.log_weights()[i] * std::log(a);
  }
  return s + obj.barrier_weight() * barrier;
}

// Shrinking pattern search around `best` over a box parametrization.
template <typename Eval>
std::pair<Vec, double> refine(Vec best, double value, double h, const Eval& eval) {
  const auto n = static_cast<int>(best.size());
  for (int level = 0; level < 5; ++level) {
    h /= 10.0;
    const int w = 15;
    Vec center = best;
    std::vector<int> idx(n, -w);
    while (true) {
      Vec p = center;
      for (int i = 0; i < n; ++i) p[i] += h * idx[i];
      const double v = eval(p);
      if (v < value) {
        value = v;
        best = p;
      }
      int i = 0;
      while (i < n && ++idx[i] > w) idx[i++] = -w;
      if (i == n) break;
    }
  }
  return {best, value};
}

double simplex_barrier(const Vec& x) {
  double b = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) return std::numeric_limits<double>::infinity();
    b -= std::log(x[i]);
  }
  return b;
}

QuadraticObjective random_objective(std::mt19937_64& g, int dim, int d_state, bool spectral) {
  QuadraticObjective obj(dim, 0.05 + rng::uniform01(g));
  const int terms = 1 + static_cast<int>(g() % 4);
  for (int k = 0; k < terms; ++k) {
    Vec gfun;
    if (spectral) {
      gfun = phi_functional(random_hermitian(g, d_state));
    } else {
      gfun = Vec(dim);
      for (int i = 0; i < dim; ++i) gfun[i] = 2.0 * rng::standard_normal(g);
    }
    obj.add_surrogate(gfun, rng::uniform01(g), rng::standard_normal(g),
                      kMaxBeta * rng::uniform01(g));
  }
  Vec lin(dim);
  for (int i = 0; i < dim; ++i) lin[i] = rng::standard_normal(g);
  obj.add_linear(lin);
  if (g() % 2 == 0) {
    Vec a(dim);
    if (spectral) {
      Vec e = log_uniform_spectrum(g, d_state, 0.01, 1.0);
      a = phi_functional(random_with_spectrum(g, e / e.sum()));
    } else {
      for (int i = 0; i < dim; ++i) a[i] = rng::exponential(g);
    }
    obj.add_log_term(a, 0.5 + rng::uniform01(g));
  }
  return obj;
}

}  // namespace

CriterionResult criterion_11() {
  Stopwatch sw;
  std::mt19937_64 g = test_stream("acceptance.solver-oracle");
  double arg_err = 0.0, obj_err = 0.0;
  int instances = 0;

  // Simplex, d = 2 and 3: grid of step 1e-3 then local refinement.
  for (int k = 0; k < 8; ++k) {
    const int d = 2 + k % 2;
    const QuadraticObjective obj = random_objective(g, d, d, false);
    auto eval = [&](const Vec& p) {
      Vec x(d);
      if (d == 2) x << p[0], 1.0 - p[0];
      else x << p[0], p[1], 1.0 - p[0] - p[1];
      const double b = simplex_barrier(x);
      return std::isfinite(b) ? oracle_value(obj, x, b) : std::numeric_limits<double>::infinity();
    };
    const double h = 1e-3;
    Vec best(d - 1);
    double bv = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 1000; ++i) {
      for (int j = (d == 2 ? 0 : 1); j < (d == 2 ? 1 : 1000 - i); ++j) {
        Vec p(d - 1);
        if (d == 2) p << i * h;
        else p << i * h, j * h;
        const double v = eval(p);
        if (v < bv) {
          bv = v;
          best = p;
        }
      }
    }
    const auto [pbest, vbest] = refine(best, bv, h, eval);
    Vec xo(d);
    if (d == 2) xo << pbest[0], 1.0 - pbest[0];
    else xo << pbest[0], pbest[1], 1.0 - pbest[0] - pbest[1];
    const SimplexReport rep = minimize_simplex(obj, Portfolio::uniform(d), 1e-12);
    arg_err = std::max(arg_err, (rep.minimizer.weights() - xo).lpNorm<Eigen::Infinity>());
    obj_err = std::max(obj_err, std::abs(rep.objective_value - vbest));
    ++instances;
  }

  // Spectraplex, d = 2: X = [[a, x + iy], [x - iy, 1 - a]], phi = (x, y, a, 1 - a).
  for (int k = 0; k < 4; ++k) {
    const QuadraticObjective obj = random_objective(g, 4, 2, true);
    auto eval = [&](const Vec& p) {
      const double det = p[0] * (1.0 - p[0]) - p[1] * p[1] - p[2] * p[2];
      if (!(p[0] > 0.0 && p[0] < 1.0 && det > 0.0)) return std::numeric_limits<double>::infinity();
      Vec v(4);
      v << p[1], p[2], p[0], 1.0 - p[0];
      return oracle_value(obj, v, -std::log(det));
    };
    Vec best(3);
    double bv = std::numeric_limits<double>::infinity();
    for (int ia = 1; ia < 200; ++ia) {
      const double a = ia / 200.0;
      const double rad = std::sqrt(a * (1.0 - a));
      for (int ir = 0; ir < 100; ++ir) {
        for (int it = 0; it < 128; ++it) {
          const double th = 2.0 * std::numbers::pi * it / 128.0;
          Vec p(3);
          p << a, rad * ir / 100.0 * std::cos(th), rad * ir / 100.0 * std::sin(th);
          const double v = eval(p);
          if (v < bv) {
            bv = v;
            best = p;
          }
        }
      }
    }
    const auto [pbest, vbest] = refine(best, bv, 5e-3, eval);
    const SpectraplexReport rep = minimize_spectraplex(obj, QuantumState::maximally_mixed(2), 1e-12);
    const CMat& xs = rep.minimizer.matrix().matrix();
    CMat xo(2, 2);
    xo << Complex(pbest[0], 0.0), Complex(pbest[1], pbest[2]), Complex(pbest[1], -pbest[2]),
        Complex(1.0 - pbest[0], 0.0);
    arg_err = std::max(arg_err, (xs - xo).cwiseAbs().maxCoeff());
    obj_err = std::max(obj_err, std::abs(rep.objective_value - vbest));
    ++instances;
  }

  // best_crp against a step-1e-3 grid over the closed simplex, d = 3, T = 50.
  double crp_err = 0.0;
  for (int k = 0; k < 4; ++k) {
    std::vector<ReturnsVec> rs;
    for (int t = 0; t < 50; ++t) rs.push_back(normalize_returns(spread_point(g, 3)));
    const CrpResult crp = best_crp(rs);
    double grid = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
      for (int j = 0; i + j <= 1000; ++j) {
        const double u0 = i * 1e-3, u1 = j * 1e-3, u2 = 1.0 - u0 - u1;
        double s = 0.0;
        for (const ReturnsVec& r : rs) s -= std::log(u0 * r[0] + u1 * r[1] + std::max(u2, 0.0) * r[2]);
        grid = std::min(grid, s);
      }
    }
    crp_err = std::max(crp_err, std::abs(crp.loss - grid));
  }

  CriterionResult res;
  res.passed = arg_err <= 5e-3 && obj_err <= 1e-6 && crp_err <= 5e-3;
  res.detail = str(instances) + " solver instances, max argument error " + str(arg_err) +
               ", max objective error " + str(obj_err) + "; best_crp vs grid " + str(crp_err);
  res.seconds = sw.seconds();
  return res;
}

}  // namespace bisons::acceptance
