#include "bisons/comparators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>

namespace bisons {

namespace {

// Merges identical functionals; returns (functional, multiplicity) pairs in
// a deterministic order.
std::vector<std::pair<Vec, double>> merge_terms(const std::vector<Vec>& terms) {
  std::map<std::vector<double>, double> counts;
  for (const Vec& a : terms) counts[std::vector<double>(a.data(), a.data() + a.size())] += 1.0;
  std::vector<std::pair<Vec, double>> out;
  out.reserve(counts.size());
  for (const auto& [key, w] : counts) {
    out.emplace_back(Eigen::Map<const Vec>(key.data(), static_cast<Eigen::Index>(key.size())), w);
  }
  return out;
}

QuadraticObjective log_objective(int dim, const std::vector<std::pair<Vec, double>>& terms) {
  QuadraticObjective obj(dim, 1.0);
  for (const auto& [a, w] : terms) obj.add_log_term(a, w);
  return obj;
}

double weighted_log_loss(const Vec& v, const std::vector<std::pair<Vec, double>>& terms) {
  double s = 0.0;
  for (const auto& [a, w] : terms) s -= w * std::log(a.dot(v));
  return s;
}

}  // namespace

CrpResult best_crp(const std::vector<ReturnsVec>& returns, double tol) {
  require(!returns.empty(), Errc::kInvalidArgument, "best_crp: empty sequence");
  require(tol > 0.0, Errc::kInvalidArgument, "best_crp: tolerance must be positive");
  const int d = returns.front().dim();
  std::vector<Vec> raw;
  raw.reserve(returns.size());
  for (const ReturnsVec& r : returns) {
    require(r.dim() == d, Errc::kDimensionMismatch, "best_crp: mixed dimensions");
    raw.push_back(r.values());
  }
  const auto terms = merge_terms(raw);
  QuadraticObjective obj = log_objective(d, terms);
  Portfolio u = Portfolio::uniform(d);
  int stages = 0;
  for (double mu = 1.0;; mu *= 0.5) {
    obj.set_barrier_weight(mu);
    u = minimize_simplex(obj, u, tol).minimizer;
    ++stages;
    if (mu <= tol / d) break;
  }
  return {u, weighted_log_loss(u.weights(), terms), stages};
}

QuantumComparatorResult best_quantum_state(const std::vector<HermitianMatrix>& losses,
                                           double tol) {
  require(!losses.empty(), Errc::kInvalidArgument, "best_quantum_state: empty sequence");
  require(tol > 0.0, Errc::kInvalidArgument, "best_quantum_state: tolerance must be positive");
  const int d = losses.front().dim();
  std::vector<Vec> raw;
  raw.reserve(losses.size());
  for (const HermitianMatrix& r : losses) {
    require(r.dim() == d, Errc::kDimensionMismatch, "best_quantum_state: mixed dimensions");
    raw.push_back(phi_functional(r));
  }
  const auto terms = merge_terms(raw);
  QuadraticObjective obj = log_objective(d * d, terms);
  QuantumState x = QuantumState::maximally_mixed(d);
  int stages = 0;
  for (double mu = 1.0;; mu *= 0.5) {
    obj.set_barrier_weight(mu);
    x = minimize_spectraplex(obj, x, tol).minimizer;
    ++stages;
    if (mu <= tol / d) break;
  }
  return {x, weighted_log_loss(vectorize_phi(x.matrix()), terms), stages};
}

Vec project_simplex(const Vec& v) {
  const Eigen::Index n = v.size();
  Vec u = v;
  std::sort(u.data(), u.data() + n, std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

Vec project_simplex_norm(const Vec& y, const Mat& a, int max_iterations, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  const double lip = 2.0 * es.eigenvalues().maxCoeff();
  require(lip > 0.0, Errc::kNumeric, "project_simplex_norm: A must be positive definite");
  Vec x = project_simplex(y);
  Vec z = x;
  double momentum = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vec grad = 2.0 * a * (z - y);
    const Vec next = project_simplex(z - grad / lip);
    const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    z = next + ((momentum - 1.0) / m_next) * (next - x);
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    momentum = m_next;
    if (change <= tol) break;
  }
  return x;
}

OnsTrajectory ons_baseline(const std::vector<ReturnsVec>& returns, double eta, double epsilon,
                           double mixing) {
  require(eta > 0.0, Errc::kParameter, "ONS step size must be positive");
  require(mixing >= 0.0 && mixing < 1.0, Errc::kParameter, "ONS mixing must lie in [0, 1)");
  require(epsilon > 0.0, Errc::kParameter, "ONS regularizer must be positive");
  OnsTrajectory traj;
  if (returns.empty()) return traj;
  const int d = returns.front().dim();
  Mat a = epsilon * Mat::Identity(d, d);
  Vec x = Portfolio::uniform(d).weights();
  for (const ReturnsVec& r : returns) {
    require(r.dim() == d, Errc::kDimensionMismatch, "ONS: mixed dimensions");
    const Portfolio played =
        Portfolio::from_solver(((1.0 - mixing) * x.array() + mixing / d).matrix());
    traj.played.push_back(played);
    traj.losses.push_back(log_loss(played, r));
    const Vec g = log_loss_gradient(played.weights(), r.values());
    a.noalias() += g * g.transpose();
    const Vec step = a.llt().solve(g);
    x = project_simplex_norm(x - eta * step, a);
  }
  return traj;
}

}  // namespace bisons
