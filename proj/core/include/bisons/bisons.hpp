#pragma once

// BISONS: epoch-structured FTRL over biased quadratic surrogates of the log
// loss with a log-barrier regularizer. Each epoch keeps two accumulated
// objectives, the biased one that produces the played portfolio x and the
// unbiased one that produces the reference point u. The epoch ends when some
// asset has 2(1+6 eta) beta u_i p_i >= 1, after which all history is dropped.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bisons/barrier_solver.hpp"
#include "bisons/geometry.hpp"

namespace bisons {

struct BisonsParams {
  int d = 2;
  long long T = 0;
  double B = 0.0;
  double eta = 0.0;
  double beta = 0.0;
};

/// B = 264/5 d ln T, eta = 1/(4B), beta = 11/(7B). Requires T >= 110 d^2.
BisonsParams default_params(int d, long long T);

/// Throws Errc::kParameter when the parameters leave the admissible set:
/// T >= 110 d^2, T >= max(2d, 1/beta), beta in (0, sqrt(2) - 1],
/// 0 < eta <= min(1/(4B), beta/4, 1/63), B >= 0.
void validate_params(const BisonsParams& params);

/// Entrywise max(p_i, 1/x_i). Throws Errc::kInteriority on a zero entry.
Vec update_bias(const Vec& p, const Portfolio& x_next);

/// The factor 2(1+6 eta) beta of the reset rule.
double reset_scale(double eta, double beta);

/// True iff some i has 2(1+6 eta) beta u_i p_i >= 1.
bool check_reset(const Portfolio& u_next, const Vec& p_next, const BisonsParams& params);

struct BisonsEpochState {
  int epoch = 1;
  long long tau = 1;
  Vec p;       // p_tau
  Vec p_prev;  // p_{tau-1}
  QuadraticObjective biased;    // G_{tau-1}
  QuadraticObjective unbiased;  // F_{tau-1}
  Portfolio x;  // x_tau
  Portfolio u;  // u_tau

  /// Epoch-initial state: p = d 1, pure barrier objectives, x = u = uniform.
  static BisonsEpochState initial(const BisonsParams& params, int epoch = 1);
};

struct RoundRecord {
  long long t = 0;
  int epoch = 1;
  long long tau = 1;
  double loss = 0.0;
  bool reset_triggered = false;
  Portfolio x_played = Portfolio::uniform(2);
};

/// Quantities of one round that the run monitors inspect. `x_next`, `u_next`
/// and `p_next` are the values computed before the reset decision.
struct BisonsRoundDetail {
  Portfolio x_cur = Portfolio::uniform(2);
  Portfolio u_cur = Portfolio::uniform(2);
  Portfolio x_next = Portfolio::uniform(2);
  Portfolio u_next = Portfolio::uniform(2);
  Vec p_prev;
  Vec p_cur;
  Vec p_next;
  int newton_x = 0;
  int newton_u = 0;
};

/// Runs the algorithm one round at a time without copying the state.
class BisonsRunner {
 public:
  /// `tol <= 0` selects default_tolerance(T).
  explicit BisonsRunner(const BisonsParams& params, double tol = 0.0,
                        const SolverOptions& solver = {});

  const BisonsParams& params() const { return params_; }
  const BisonsEpochState& state() const { return state_; }
  long long t() const { return t_; }
  double tolerance() const { return tol_; }

  /// Plays x_tau against `r`. Throws Errc::kInvalidArgument after T rounds.
  RoundRecord step(const ReturnsVec& r, BisonsRoundDetail* detail = nullptr);

 private:
  BisonsParams params_;
  double tol_;
  SolverOptions solver_;
  BisonsEpochState state_;
  long long t_ = 0;
};

/// One round on an explicit state value. `t` is the global round index used
/// only for the record; the returned state is fresh on reset.
std::pair<BisonsEpochState, RoundRecord> bisons_round(const BisonsEpochState& state,
                                                      const ReturnsVec& r,
                                                      const BisonsParams& params,
                                                      long long t, double tol);

struct BisonsTrajectory {
  std::vector<RoundRecord> rounds;
  /// Rounds whose reset rule fired, in order.
  std::vector<long long> reset_times;
  /// Number of epochs that ended by reset.
  int completed_epochs = 0;
};

using BisonsObserver = std::function<void(const RoundRecord&, const BisonsRoundDetail&)>;

/// Plays the whole sequence (at most T rounds). `observer`, when given, sees
/// every round together with its detail.
BisonsTrajectory run_bisons(std::span<const ReturnsVec> returns, const BisonsParams& params,
                            double tol = 0.0, const BisonsObserver& observer = {});

/// Violation counters for the per-round properties of a BISONS run.
struct BisonsMonitor {
  explicit BisonsMonitor(const BisonsParams& params, double tol = 1e-8);

  void observe(const RoundRecord& rec, const BisonsRoundDetail& detail);
  /// Closes the bookkeeping of the current epoch (also done on reset).
  void finish();

  long long rounds = 0;
  long long stability_violations = 0;    // x_tau vs x_{tau+1} ratio (1+6 eta)
  long long bias_growth_violations = 0;  // p_{tau+1} <= (1+6 eta) p_tau
  long long doubling_violations = 0;     // u_{tau+1} <= 2 u_tau
  long long range_violations = 0;        // p <= T^2
  long long dominance_violations = 0;    // p >= 1/x, p nondecreasing
  long long cost_violations = 0;         // cost of bias per epoch
  double worst_cost_slack = 0.0;

  long long total_violations() const;

 private:
  BisonsParams params_;
  double tol_;
  double epoch_cost_ = 0.0;
  Vec epoch_last_p_;
};

}  // namespace bisons
