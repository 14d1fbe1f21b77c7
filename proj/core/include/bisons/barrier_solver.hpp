#pragma once

// Damped Newton minimization of barrier-regularized objectives
//
//   F(v) = c + <lin, v> + 1/2 v^T Q v - sum_s w_s log <a_s, v> + mu * Barrier(v)
//
// over the probability simplex (v = x, Barrier = -sum log x_i) or over the
// spectraplex (v = phi(X), Barrier = -log det X). Every component is
// self-concordant, so the Newton decrement lambda certifies
// F(v) - min F <= lambda^2 once lambda * max(1, mu^{-1/2}) <= 0.68.
//
// The simplex constraint is eliminated with an orthonormal tangent basis
// (d - 1 free coordinates). The trace constraint of the spectraplex enters
// the Newton system through a scalar Lagrange multiplier.

#include <optional>
#include <vector>

#include "bisons/error.hpp"
#include "bisons/geometry.hpp"
#include "bisons/hermitian.hpp"

namespace bisons {

enum class Domain { kSimplex, kSpectraplex };

class QuadraticObjective {
 public:
  /// `dim` is d for the simplex and d^2 (phi coordinates) for the
  /// spectraplex. `barrier_weight` must be positive.
  QuadraticObjective(int dim, double barrier_weight);

  int dim() const { return static_cast<int>(lin_.size()); }
  const Mat& quad() const { return quad_; }
  const Vec& lin() const { return lin_; }
  double constant() const { return constant_; }
  double barrier_weight() const { return barrier_weight_; }
  void set_barrier_weight(double w);

  /// Adds value + (<g, v> - g_at_anchor) + curvature/2 (<g, v> - g_at_anchor)^2
  /// where g_at_anchor = <g, v_anchor>. This is the surrogate loss in
  /// coefficient form; `g` is the gradient functional in the objective's
  /// coordinates.
  void add_surrogate(const Vec& g, double anchor_value, double g_at_anchor,
                     double curvature);
  void add_linear(const Vec& coef);
  void add_constant(double c) { constant_ += c; }
  /// Adds -weight * log <a, v>.
  void add_log_term(const Vec& a, double weight = 1.0);

  std::size_t log_term_count() const { return log_a_.size(); }
  const std::vector<Vec>& log_functionals() const { return log_a_; }
  const std::vector<double>& log_weights() const { return log_w_; }

  /// Value without the barrier; +inf where a log term's argument is <= 0.
  double smooth_value(const Vec& v) const;
  Vec smooth_gradient(const Vec& v) const;
  Mat smooth_hessian(const Vec& v) const;

  /// Drops every accumulated term, keeping the barrier weight.
  void reset();

 private:
  Mat quad_;
  Vec lin_;
  double constant_ = 0.0;
  double barrier_weight_;
  std::vector<Vec> log_a_;
  std::vector<double> log_w_;
};

struct SolverOptions {
  int max_iterations = 200;
  double armijo = 0.25;
  double backtrack = 0.5;
  double fraction_to_boundary = 0.99;
  /// Record F after every iterate into SolveReport::objective_trace.
  bool record_trace = false;
};

template <typename Point>
struct SolveReport {
  Point minimizer;
  double objective_value = 0.0;
  double certified_gap = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;
};

using SimplexReport = SolveReport<Portfolio>;
using SpectraplexReport = SolveReport<QuantumState>;

/// Raised when Newton does not certify the requested gap. Carries the best
/// iterate reached, in objective coordinates.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, Vec best_iterate, double best_value,
                double gap)
      : Error(Errc::kSolverFailure, what),
        best_iterate_(std::move(best_iterate)),
        best_value_(best_value),
        gap_(gap) {}

  const Vec& best_iterate() const { return best_iterate_; }
  double best_value() const { return best_value_; }
  double gap() const { return gap_; }

 private:
  Vec best_iterate_;
  double best_value_;
  double gap_;
};

/// Default tolerance for a run of horizon T: min(1e-10, T^-2).
double default_tolerance(long long horizon);

SimplexReport minimize_simplex(const QuadraticObjective& obj,
                               const Portfolio& warm_start, double tol,
                               const SolverOptions& options = {});

SpectraplexReport minimize_spectraplex(const QuadraticObjective& obj,
                                       const QuantumState& warm_start,
                                       double tol,
                                       const SolverOptions& options = {});

/// Objective value including the barrier; +inf outside the domain.
double objective_value(const QuadraticObjective& obj, const Vec& v, Domain domain);

/// Gradient including the barrier, in objective coordinates.
Vec objective_gradient(const QuadraticObjective& obj, const Vec& v, Domain domain);

}  // namespace bisons
