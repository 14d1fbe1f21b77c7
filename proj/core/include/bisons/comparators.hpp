#pragma once

// Hindsight comparators and the online Newton step baseline.

#include <vector>

#include "bisons/barrier_solver.hpp"
#include "bisons/geometry.hpp"
#include "bisons/hermitian.hpp"

namespace bisons {

struct CrpResult {
  Portfolio portfolio;
  double loss = 0.0;  // sum_t -log <u, r_t>
  int stages = 0;     // continuation stages used
};

/// Best constant rebalanced portfolio. Minimizes sum_t -log<u, r_t> + mu
/// barrier for mu = 1, 1/2, 1/4, ... until mu <= tol / d, warm starting each
/// stage. Identical returns vectors are merged into one weighted term.
CrpResult best_crp(const std::vector<ReturnsVec>& returns, double tol = 1e-10);

struct QuantumComparatorResult {
  QuantumState state;
  double loss = 0.0;
  int stages = 0;
};

/// Spectraplex analogue of best_crp; `losses` must be unit-trace PSD.
QuantumComparatorResult best_quantum_state(const std::vector<HermitianMatrix>& losses,
                                           double tol = 1e-10);

/// Euclidean projection onto the probability simplex.
Vec project_simplex(const Vec& v);

/// argmin over the simplex of (x - y)^T A (x - y), by accelerated projected
/// gradient. A must be symmetric positive definite.
Vec project_simplex_norm(const Vec& y, const Mat& a, int max_iterations = 2000,
                         double tol = 1e-13);

struct OnsTrajectory {
  std::vector<Portfolio> played;
  std::vector<double> losses;
};

/// Online Newton step: A_t = eps I + sum grad grad^T,
/// x_{t+1} = proj_A(x_t - eta A_t^{-1} grad_t). The played point mixes x_t
/// with the uniform portfolio at weight `mixing` so the loss stays finite
/// when the projection lands on a face.
OnsTrajectory ons_baseline(const std::vector<ReturnsVec>& returns, double eta = 1.0,
                           double epsilon = 1.0, double mixing = 1e-3);

}  // namespace bisons
