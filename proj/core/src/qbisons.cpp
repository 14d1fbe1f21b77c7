#include "bisons/qbisons.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "bisons/rng.hpp"

namespace bisons {

QBisonsParams q_default_params(int d, long long T) {
  require(d >= 1, Errc::kParameter, "d must be positive");
  require(T >= 110LL * d * d, Errc::kParameter,
          "horizon too short: T must be at least 110 d^2 = " + std::to_string(110LL * d * d));
  QBisonsParams p;
  p.d = d;
  p.T = T;
  p.B = 264.0 / 5.0 * d * d * std::log(static_cast<double>(T));
  p.eta = 1.0 / (4.0 * p.B);
  p.beta = 11.0 * d / (7.0 * p.B);
  q_validate_params(p);
  return p;
}

void q_validate_params(const QBisonsParams& p) {
  require(p.d >= 1, Errc::kParameter, "d must be positive");
  require(p.T >= 110LL * p.d * p.d, Errc::kParameter, "T must be at least 110 d^2");
  validate_beta(p.beta);
  require(p.B >= 0.0 && std::isfinite(p.B), Errc::kParameter, "B must be finite and nonnegative");
  require(static_cast<double>(p.T) >= std::max(2.0 * p.d, 1.0 / p.beta), Errc::kParameter,
          "T must be at least max(2d, 1/beta)");
  double cap = std::min(p.beta / 4.0, 1.0 / 63.0);
  if (p.B > 0.0) cap = std::min(cap, 1.0 / (4.0 * p.B));
  require(p.eta > 0.0 && p.eta <= cap * (1.0 + 4e-16), Errc::kParameter,
          "eta must lie in (0, min(1/(4B), beta/4, 1/63)]");
}

namespace {

bool is_diagonal(const HermitianMatrix& m) {
  const CMat& a = m.matrix();
  for (int j = 0; j < m.dim(); ++j) {
    for (int i = 0; i < m.dim(); ++i) {
      if (i != j && a(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

HermitianMatrix q_update_bias(const HermitianMatrix& p, const HermitianMatrix& x_next) {
  require(p.dim() == x_next.dim(), Errc::kDimensionMismatch, "q_update_bias: dimension mismatch");
  const int d = p.dim();
  if (is_diagonal(p) && is_diagonal(x_next)) {
    // Commuting diagonal case: the update is the entrywise max(p_i, 1/x_i).
    const Vec x = x_next.matrix().diagonal().real();
    if (x.minCoeff() <= 0.0) fail(Errc::kConditioning, "q_update_bias: X is not PD");
    return HermitianMatrix::diagonal(p.matrix().diagonal().real().cwiseMax(x.cwiseInverse()));
  }
  const HermitianMatrix half = sqrt_psd(x_next);
  const HermitianMatrix inv_half = inv_sqrt(x_next);
  const HermitianMatrix inner = HermitianMatrix::identity(d) - half.congruence(p);
  return p + inv_half.congruence(positive_part(inner));
}

bool q_check_reset(const HermitianMatrix& u, const HermitianMatrix& p,
                   const QBisonsParams& params) {
  require(u.dim() == p.dim(), Errc::kDimensionMismatch, "q_check_reset: dimension mismatch");
  const double k = 2.0 * (1.0 + 6.0 * params.eta) * params.beta;
  const HermitianMatrix limit = inverse_pd(p) * (1.0 / k);
  return (limit - u).min_eigenvalue() <= 0.0;
}

HermitianMatrix normalize_loss_matrix(const HermitianMatrix& r) {
  const Vec ev = r.eigenvalues();
  if (!ev.allFinite() || ev.minCoeff() < -1e-10) {
    fail(Errc::kInvalidReturns, "loss matrix must be positive semidefinite");
  }
  const double tr = r.trace();
  if (!(tr > 0.0)) fail(Errc::kInvalidReturns, "loss matrix has zero trace");
  if (std::abs(tr - 1.0) <= 4.0 * 2.220446049250313e-16 * r.dim()) return r;
  return r * (1.0 / tr);
}

QBisonsEpochState QBisonsEpochState::initial(const QBisonsParams& params, int epoch) {
  const int d = params.d;
  const double w = 1.0 / params.eta;
  const HermitianMatrix p0 = HermitianMatrix::identity(d) * static_cast<double>(d);
  return QBisonsEpochState{epoch,
                           1,
                           p0,
                           p0,
                           QuadraticObjective(d * d, w),
                           QuadraticObjective(d * d, w),
                           QuantumState::maximally_mixed(d),
                           QuantumState::maximally_mixed(d)};
}

namespace {

bool advance(QBisonsEpochState& s, const HermitianMatrix& r_raw, const QBisonsParams& params,
             double tol, const SolverOptions& solver, double& loss,
             QBisonsRoundDetail* detail) {
  require(r_raw.dim() == params.d, Errc::kDimensionMismatch,
          "loss matrix dimension differs from d");
  const HermitianMatrix r = normalize_loss_matrix(r_raw);
  const double y = trace_inner(s.x.matrix(), r);
  if (!(y >= 1e-300)) fail(Errc::kInfiniteLoss, "<X, R> vanished");
  loss = -std::log(y);
  const Vec g = phi_functional(r) * (-1.0 / y);
  s.unbiased.add_surrogate(g, loss, -1.0, params.beta);
  s.biased.add_surrogate(g, loss, -1.0, params.beta);
  s.biased.add_linear(phi_functional(s.p - s.p_prev) * (-params.B));

  SpectraplexReport xr = minimize_spectraplex(s.biased, s.x, tol, solver);
  SpectraplexReport ur = minimize_spectraplex(s.unbiased, s.u, tol, solver);
  HermitianMatrix p_next = q_update_bias(s.p, xr.minimizer.matrix());
  const bool reset = q_check_reset(ur.minimizer.matrix(), p_next, params);

  if (detail != nullptr) {
    detail->x_cur = s.x;
    detail->u_cur = s.u;
    detail->x_next = xr.minimizer;
    detail->u_next = ur.minimizer;
    detail->p_prev = s.p_prev;
    detail->p_cur = s.p;
    detail->p_next = p_next;
    detail->newton_x = xr.iterations;
    detail->newton_u = ur.iterations;
  }

  s.x = std::move(xr.minimizer);
  s.u = std::move(ur.minimizer);
  s.p_prev = std::move(s.p);
  s.p = std::move(p_next);
  ++s.tau;
  return reset;
}

}  // namespace

QBisonsRunner::QBisonsRunner(const QBisonsParams& params, double tol,
                             const SolverOptions& solver)
    : params_(params),
      tol_(tol > 0.0 ? tol : default_tolerance(params.T)),
      solver_(solver),
      state_((q_validate_params(params), QBisonsEpochState::initial(params))) {}

QRoundRecord QBisonsRunner::step(const HermitianMatrix& r, QBisonsRoundDetail* detail) {
  require(t_ < params_.T, Errc::kInvalidArgument, "more rounds than the horizon T");
  ++t_;
  QRoundRecord rec{t_, state_.epoch, state_.tau, 0.0, false, state_.x};
  rec.reset_triggered = advance(state_, r, params_, tol_, solver_, rec.loss, detail);
  if (rec.reset_triggered && t_ < params_.T) {
    state_ = QBisonsEpochState::initial(params_, state_.epoch + 1);
  }
  return rec;
}

std::pair<QBisonsEpochState, QRoundRecord> qbisons_round(const QBisonsEpochState& state,
                                                         const HermitianMatrix& r,
                                                         const QBisonsParams& params,
                                                         long long t, double tol) {
  QBisonsEpochState next = state;
  QRoundRecord rec{t, state.epoch, state.tau, 0.0, false, state.x};
  rec.reset_triggered = advance(next, r, params, tol, SolverOptions{}, rec.loss, nullptr);
  if (rec.reset_triggered) next = QBisonsEpochState::initial(params, state.epoch + 1);
  return {std::move(next), std::move(rec)};
}

QBisonsTrajectory run_qbisons(std::span<const HermitianMatrix> losses,
                              const QBisonsParams& params, double tol,
                              const QBisonsObserver& observer) {
  require(static_cast<long long>(losses.size()) <= params.T, Errc::kInvalidArgument,
          "sequence is longer than the horizon T");
  QBisonsTrajectory traj;
  QBisonsRunner runner(params, tol);
  QBisonsRoundDetail detail;
  for (const HermitianMatrix& r : losses) {
    QRoundRecord rec = runner.step(r, observer ? &detail : nullptr);
    if (observer) observer(rec, detail);
    if (rec.reset_triggered) {
      traj.reset_times.push_back(rec.t);
      ++traj.completed_epochs;
    }
    traj.rounds.push_back(std::move(rec));
    traj.losses.push_back(normalize_loss_matrix(r));
  }
  return traj;
}

QBisonsTrajectory run_qbisons(std::span<const MeasurementEvent> events,
                              const QBisonsParams& params, std::uint64_t seed, double tol,
                              const QBisonsObserver& observer) {
  std::mt19937_64 gen = rng::stream(seed, "qbisons.measurement");
  std::vector<HermitianMatrix> losses;
  losses.reserve(events.size());
  for (const MeasurementEvent& ev : events) losses.push_back(reduce_measurement(ev, &gen));
  return run_qbisons(std::span<const HermitianMatrix>(losses), params, tol, observer);
}

QBisonsMonitor::QBisonsMonitor(const QBisonsParams& params, double tol)
    : params_(params), tol_(tol) {}

void QBisonsMonitor::observe(const QRoundRecord& rec, const QBisonsRoundDetail& dt) {
  ++rounds;
  const double k = 1.0 + 6.0 * params_.eta;
  const HermitianMatrix& xc = dt.x_cur.matrix();
  const HermitianMatrix& xn = dt.x_next.matrix();
  const double t2 = static_cast<double>(params_.T) * static_cast<double>(params_.T);

  if (!loewner_leq(xc, xn * k, tol_) || !loewner_leq(xn, xc * k, tol_)) ++stability_violations;
  if (!loewner_leq(dt.p_next, dt.p_cur * k, tol_)) ++bias_growth_violations;
  if (rec.tau >= 2 && !loewner_leq(dt.u_next.matrix(), dt.u_cur.matrix() * 2.0, tol_)) {
    ++doubling_violations;
  }
  if (dt.p_next.max_eigenvalue() > t2) ++range_violations;
  if (!loewner_leq(dt.p_cur, dt.p_next, tol_) || !loewner_leq(inverse_pd(xn), dt.p_next, tol_)) {
    ++dominance_violations;
  }
  const double lhs = a_norm(dt.p_next - dt.p_cur, xn);
  const double rhs = a_norm(xn - xc, inverse_pd(xc));
  if (lhs > rhs + tol_) ++increment_violations;

  // U_tau <= X_s / beta for every s <= tau of the epoch
  if (rec.tau == 1) epoch_x_.clear();
  epoch_x_.push_back(xc);
  for (const HermitianMatrix& xs : epoch_x_) {
    if (!loewner_leq(dt.u_cur.matrix(), xs * (1.0 / params_.beta), tol_)) {
      ++comparator_violations;
      break;
    }
  }
}

long long QBisonsMonitor::total_violations() const {
  return stability_violations + bias_growth_violations + doubling_violations +
         range_violations + dominance_violations + increment_violations +
         comparator_violations;
}

}  // namespace bisons
