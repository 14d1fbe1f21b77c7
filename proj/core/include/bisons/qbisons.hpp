#pragma once

// Schroedinger's-BISONS: the BISONS scheme on the spectraplex. The barrier is
// -log det X, the bias is a PD matrix updated by
//   P' = P + X^{-1/2} (I - X^{1/2} P X^{1/2})_+ X^{-1/2},
// and an epoch ends once U is no longer strictly below (2(1+6 eta) beta P)^{-1}
// in the Loewner order. Objectives live in phi coordinates (d^2 reals).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bisons/barrier_solver.hpp"
#include "bisons/hermitian.hpp"

namespace bisons {

struct QBisonsParams {
  int d = 2;
  long long T = 0;
  double B = 0.0;
  double eta = 0.0;
  double beta = 0.0;
};

/// B = 264/5 d^2 ln T, eta = 1/(4B), beta = 11 d/(7B). Requires T >= 110 d^2.
QBisonsParams q_default_params(int d, long long T);

/// Same admissible set as the vector algorithm, with d >= 1.
void q_validate_params(const QBisonsParams& params);

/// P + X^{-1/2} (I - X^{1/2} P X^{1/2})_+ X^{-1/2}.
HermitianMatrix q_update_bias(const HermitianMatrix& p, const HermitianMatrix& x_next);

/// True iff lambda_min((2(1+6 eta) beta P)^{-1} - U) <= 0.
bool q_check_reset(const HermitianMatrix& u, const HermitianMatrix& p,
                   const QBisonsParams& params);

/// Scales a PSD loss matrix to unit trace. Throws Errc::kInvalidReturns when
/// the matrix is not PSD or has zero trace.
HermitianMatrix normalize_loss_matrix(const HermitianMatrix& r);

struct QBisonsEpochState {
  int epoch = 1;
  long long tau = 1;
  HermitianMatrix p;
  HermitianMatrix p_prev;
  QuadraticObjective biased;
  QuadraticObjective unbiased;
  QuantumState x;
  QuantumState u;

  static QBisonsEpochState initial(const QBisonsParams& params, int epoch = 1);
};

struct QRoundRecord {
  long long t = 0;
  int epoch = 1;
  long long tau = 1;
  double loss = 0.0;
  bool reset_triggered = false;
  QuantumState x_played = QuantumState::maximally_mixed(1);
};

struct QBisonsRoundDetail {
  QuantumState x_cur = QuantumState::maximally_mixed(1);
  QuantumState u_cur = QuantumState::maximally_mixed(1);
  QuantumState x_next = QuantumState::maximally_mixed(1);
  QuantumState u_next = QuantumState::maximally_mixed(1);
  HermitianMatrix p_prev = HermitianMatrix::zero(1);
  HermitianMatrix p_cur = HermitianMatrix::zero(1);
  HermitianMatrix p_next = HermitianMatrix::zero(1);
  int newton_x = 0;
  int newton_u = 0;
};

class QBisonsRunner {
 public:
  explicit QBisonsRunner(const QBisonsParams& params, double tol = 0.0,
                         const SolverOptions& solver = {});

  const QBisonsParams& params() const { return params_; }
  const QBisonsEpochState& state() const { return state_; }
  long long t() const { return t_; }

  /// `r` is normalized to unit trace before use.
  QRoundRecord step(const HermitianMatrix& r, QBisonsRoundDetail* detail = nullptr);

 private:
  QBisonsParams params_;
  double tol_;
  SolverOptions solver_;
  QBisonsEpochState state_;
  long long t_ = 0;
};

std::pair<QBisonsEpochState, QRoundRecord> qbisons_round(const QBisonsEpochState& state,
                                                         const HermitianMatrix& r,
                                                         const QBisonsParams& params,
                                                         long long t, double tol);

struct QBisonsTrajectory {
  std::vector<QRoundRecord> rounds;
  std::vector<long long> reset_times;
  int completed_epochs = 0;
  /// Unit-trace loss matrices actually played against.
  std::vector<HermitianMatrix> losses;
};

using QBisonsObserver =
    std::function<void(const QRoundRecord&, const QBisonsRoundDetail&)>;

QBisonsTrajectory run_qbisons(std::span<const HermitianMatrix> losses,
                              const QBisonsParams& params, double tol = 0.0,
                              const QBisonsObserver& observer = {});

/// Reduces each measurement to a loss matrix with a single random stream
/// derived from `seed`, advanced once per fractional outcome, then runs.
QBisonsTrajectory run_qbisons(std::span<const MeasurementEvent> events,
                              const QBisonsParams& params, std::uint64_t seed,
                              double tol = 0.0, const QBisonsObserver& observer = {});

struct QBisonsMonitor {
  explicit QBisonsMonitor(const QBisonsParams& params, double tol = 1e-8);

  void observe(const QRoundRecord& rec, const QBisonsRoundDetail& detail);

  long long rounds = 0;
  long long stability_violations = 0;    // X_tau, X_{tau+1} within (1+6 eta)
  long long bias_growth_violations = 0;  // P' <= (1+6 eta) P
  long long doubling_violations = 0;     // U_{tau+1} <= 2 U_tau
  long long range_violations = 0;        // P <= T^2 I
  long long dominance_violations = 0;    // P' >= P, P' >= X^{-1}
  long long increment_violations = 0;    // ||P'-P||_X' <= ||X'-X||_{X^{-1}}
  long long comparator_violations = 0;   // U_tau <= X_s / beta, s <= tau

  long long total_violations() const;

 private:
  QBisonsParams params_;
  double tol_;
  std::vector<HermitianMatrix> epoch_x_;
};

}  // namespace bisons
