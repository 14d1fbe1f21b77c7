#pragma once

// Log-barrier FTRL on the true log losses and the adversarial sequence that
// drives it to large regret.
//
// The adversary walks the player through a list of boundary targets t_i, each
// pulled towards the centre by factors c_s = 1 - 2^s T^{-alpha}. Small
// "movement" returns steer the FTRL minimizer onto a pulled target; the
// complementary outcome o_i, which is orthogonal to t_i, is then issued
// there. Every round records the stability term
//   || grad_Pi f_t(x_t) ||^2 in the inverse of hess_Pi F_{t+1}(x_t),
// which bounds the regret against x_{T+1} from below.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bisons/barrier_solver.hpp"
#include "bisons/geometry.hpp"

namespace bisons {

/// Player state: barrier-regularized FTRL over every past log loss.
class LbftrlState {
 public:
  /// `tol <= 0` selects default_tolerance(horizon).
  LbftrlState(int d, double eta, long long horizon, double tol = 0.0);

  int dim() const { return d_; }
  double eta() const { return eta_; }
  double tolerance() const { return tol_; }
  const std::vector<Vec>& history() const { return history_; }
  const Portfolio& x() const { return x_; }
  const QuadraticObjective& objective() const { return obj_; }

  /// Appends r to the history and recomputes the minimizer (warm started).
  void observe(const ReturnsVec& r);

  /// Gradient of F = sum of past losses + eta^{-1} barrier, at `x`.
  Vec gradient(const Vec& x) const;

 private:
  int d_;
  double eta_;
  double tol_;
  QuadraticObjective obj_;
  std::vector<Vec> history_;
  Portfolio x_;
};

/// argmin of the state's objective, recomputed from scratch (cold start).
Portfolio lbftrl_play(const LbftrlState& state);

/// Exact rational with 64-bit parts, kept in lowest terms, den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  Rational operator+(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  /// Cross-multiplied; operands stay small for the plans built here.
  auto operator<=>(const Rational& o) const { return num * o.den <=> o.num * den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

using RationalVec = std::vector<Rational>;

struct TargetPair {
  RationalVec target;   // uniform on k coordinates
  RationalVec outcome;  // uniform on the other d - k coordinates
  int support = 0;      // k
};

/// All targets with k nonzero coordinates, k = 1..d-1, ordered by k and then
/// lexicographically by support. Length 2^d - 2. Requires 2 <= d <= 12.
std::vector<TargetPair> build_target_sequence(int d);

Rational rational_inner(const RationalVec& a, const RationalVec& b);

struct ValidityReport {
  bool valid = true;
  std::size_t length = 0;
  /// Smallest <t_i, o_j> over j < i (1 when the sequence has one element).
  Rational min_cross{1};
  /// First pair violating a condition, as (i, j); (-1, -1) when valid.
  int bad_i = -1;
  int bad_j = -1;
};

/// Exact check of <t_i, o_i> = 0 and <t_i, o_j> >= 1/d^2 for j < i.
ValidityReport check_sequence_validity(const std::vector<TargetPair>& seq, int d);

Vec to_vec(const RationalVec& v);

struct AdversaryPlan {
  int d = 2;
  double alpha = 0.125;
  long long T = 0;
  std::vector<TargetPair> targets;
  int layer_count = 0;         // I = floor(alpha log2(T) / 3)
  long long repetitions = 0;   // floor(T^alpha)
  std::vector<double> scaling; // c_s for s = 0..I

  double c(int s) const { return scaling.at(static_cast<std::size_t>(s)); }
};

AdversaryPlan make_plan(int d, long long T, double alpha);

/// One line per target/outcome pair, exact rationals: "t1,...,td;o1,...,od".
void write_plan(std::ostream& out, const AdversaryPlan& plan);

/// c_s x + (1 - c_s) / d.
Portfolio pull_to_center(const Portfolio& x, int s, const AdversaryPlan& plan);
Vec pull_to_center(const Vec& x, double c_s);

/// Movement return towards `target`: rescales g = Pi grad F(target) by
/// min(T^{-1/2}/|g|, 1/(d max(1 - <g, Pi target>, 0))) and lifts it back.
/// Throws Errc::kInfeasibleMovement when the lifted vector has a negative entry.
ReturnsVec move_to_x(const PiProjection& proj, const Vec& target, const Vec& grad_pi,
                     long long T);

/// grad_Pi f(x; r) = -Pi r / <x, r>.
Vec loss_gradient_pi(const PiProjection& proj, const Vec& x, const Vec& r);

/// hess_Pi F(x) for F = sum_s -log<x, r_s> + eta^{-1} barrier.
Mat lbftrl_hessian_pi(const PiProjection& proj, const Vec& x, const std::vector<Vec>& history,
                      double eta);

/// ||grad_pi||^2 in the inverse of `hessian_pi`. Throws Errc::kNumeric when
/// the Hessian is not positive definite.
double stability_term(const Vec& grad_pi, const Mat& hessian_pi);
double stability_term(const PiProjection& proj, const Vec& x, const Vec& r,
                      const Mat& hessian_pi);

struct StabilityRecord {
  long long t = 0;
  Vec grad_pi;
  Mat hessian_pi;
  double term = 0.0;
};

enum class ReturnKind { kMovement, kOutcome, kExternal };

struct LbftrlRound {
  long long t = 0;
  Vec x;  // played point
  Vec r;
  double loss = 0.0;
  ReturnKind kind = ReturnKind::kExternal;
  int target = -1;  // index i into the plan, outcome and movement rounds
  int layer = -1;   // s
  long long repetition = -1;  // k
  /// Trace of this round's Hessian contribution (Pi r)(Pi r)^T / <x, r>^2.
  double hessian_trace = 0.0;
};

struct LbftrlRun {
  std::vector<LbftrlRound> rounds;
  std::vector<StabilityRecord> stability;
  Portfolio final_x = Portfolio::uniform(2);  // x_{T+1}
  double learner_loss = 0.0;
  double comparator_loss = 0.0;  // loss of final_x on the whole sequence
  double regret = 0.0;           // against final_x
  double stability_sum = 0.0;
  long long movement_steps = 0;
  long long outcome_steps = 0;
  /// The schedule hit the horizon before finishing.
  bool truncated = false;
  /// Longest completed movement loop, and the number of loops that took more
  /// than 2 sqrt(T) |grad_Pi F(target)| / d + 1 steps.
  long long longest_move = 0;
  long long move_bound_violations = 0;
};

/// Plays LB-FTRL against the generated bad sequence until the schedule ends
/// or T rounds have been played.
LbftrlRun generate_and_run(const AdversaryPlan& plan, double eta, double tol = 0.0);

/// Plays LB-FTRL against a fixed sequence of returns.
LbftrlRun run_lbftrl(const std::vector<ReturnsVec>& returns, double eta, long long horizon,
                     double tol = 0.0);

}  // namespace bisons
