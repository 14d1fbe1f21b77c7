#include "bisons/bisons.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bisons {

BisonsParams default_params(int d, long long T) {
  require(d >= 2, Errc::kParameter, "BISONS needs d >= 2");
  require(T >= 110LL * d * d, Errc::kParameter,
          "horizon too short: T must be at least 110 d^2 = " + std::to_string(110LL * d * d));
  BisonsParams p;
  p.d = d;
  p.T = T;
  p.B = 264.0 / 5.0 * d * std::log(static_cast<double>(T));
  p.eta = 1.0 / (4.0 * p.B);
  p.beta = 11.0 / (7.0 * p.B);
  validate_params(p);
  return p;
}

void validate_params(const BisonsParams& p) {
  require(p.d >= 2, Errc::kParameter, "d must be at least 2");
  require(p.T >= 110LL * p.d * p.d, Errc::kParameter, "T must be at least 110 d^2");
  validate_beta(p.beta);
  require(p.B >= 0.0 && std::isfinite(p.B), Errc::kParameter, "B must be finite and nonnegative");
  require(static_cast<double>(p.T) >= std::max(2.0 * p.d, 1.0 / p.beta), Errc::kParameter,
          "T must be at least max(2d, 1/beta)");
  double cap = std::min(p.beta / 4.0, 1.0 / 63.0);
  if (p.B > 0.0) cap = std::min(cap, 1.0 / (4.0 * p.B));
  // The defaults hit eta = 1/(4B) exactly; allow the last ulp of rounding.
  require(p.eta > 0.0 && p.eta <= cap * (1.0 + 4e-16), Errc::kParameter,
          "eta must lie in (0, min(1/(4B), beta/4, 1/63)]");
}

Vec update_bias(const Vec& p, const Portfolio& x_next) {
  require(p.size() == x_next.dim(), Errc::kDimensionMismatch, "update_bias: dimension mismatch");
  require(x_next.interior(), Errc::kInteriority, "update_bias: x has a zero coordinate");
  return p.cwiseMax(x_next.weights().cwiseInverse());
}

double reset_scale(double eta, double beta) { return 2.0 * (1.0 + 6.0 * eta) * beta; }

bool check_reset(const Portfolio& u_next, const Vec& p_next, const BisonsParams& params) {
  require(p_next.size() == u_next.dim(), Errc::kDimensionMismatch,
          "check_reset: dimension mismatch");
  const double k = reset_scale(params.eta, params.beta);
  for (int i = 0; i < u_next.dim(); ++i) {
    if (k * u_next[i] * p_next[i] >= 1.0) return true;
  }
  return false;
}

BisonsEpochState BisonsEpochState::initial(const BisonsParams& params, int epoch) {
  const double w = 1.0 / params.eta;
  const Vec p0 = Vec::Constant(params.d, static_cast<double>(params.d));
  return BisonsEpochState{epoch,
                          1,
                          p0,
                          p0,
                          QuadraticObjective(params.d, w),
                          QuadraticObjective(params.d, w),
                          Portfolio::uniform(params.d),
                          Portfolio::uniform(params.d)};
}

namespace {

// Advances `s` by one round in place. Returns true when the reset rule fired.
bool advance(BisonsEpochState& s, const ReturnsVec& r, const BisonsParams& params,
             double tol, const SolverOptions& solver, double& loss,
             BisonsRoundDetail* detail) {
  require(r.dim() == params.d, Errc::kDimensionMismatch, "returns dimension differs from d");
  const double y = s.x.weights().dot(r.values());
  loss = log_loss(s.x, r);
  const Vec g = -r.values() / y;
  // <g, x_t> = -1 for the log loss
  s.unbiased.add_surrogate(g, loss, -1.0, params.beta);
  s.biased.add_surrogate(g, loss, -1.0, params.beta);
  s.biased.add_linear(-params.B * (s.p - s.p_prev));

  SimplexReport xr = minimize_simplex(s.biased, s.x, tol, solver);
  SimplexReport ur = minimize_simplex(s.unbiased, s.u, tol, solver);
  Vec p_next = update_bias(s.p, xr.minimizer);
  const bool reset = check_reset(ur.minimizer, p_next, params);

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

BisonsRunner::BisonsRunner(const BisonsParams& params, double tol, const SolverOptions& solver)
    : params_(params),
      tol_(tol > 0.0 ? tol : default_tolerance(params.T)),
      solver_(solver),
      state_((validate_params(params), BisonsEpochState::initial(params))) {}

RoundRecord BisonsRunner::step(const ReturnsVec& r, BisonsRoundDetail* detail) {
  require(t_ < params_.T, Errc::kInvalidArgument, "more rounds than the horizon T");
  ++t_;
  RoundRecord rec;
  rec.t = t_;
  rec.epoch = state_.epoch;
  rec.tau = state_.tau;
  rec.x_played = state_.x;
  rec.reset_triggered = advance(state_, r, params_, tol_, solver_, rec.loss, detail);
  if (rec.reset_triggered && t_ < params_.T) {
    state_ = BisonsEpochState::initial(params_, state_.epoch + 1);
  }
  return rec;
}

std::pair<BisonsEpochState, RoundRecord> bisons_round(const BisonsEpochState& state,
                                                      const ReturnsVec& r,
                                                      const BisonsParams& params,
                                                      long long t, double tol) {
  BisonsEpochState next = state;
  RoundRecord rec;
  rec.t = t;
  rec.epoch = state.epoch;
  rec.tau = state.tau;
  rec.x_played = state.x;
  rec.reset_triggered = advance(next, r, params, tol, SolverOptions{}, rec.loss, nullptr);
  if (rec.reset_triggered) next = BisonsEpochState::initial(params, state.epoch + 1);
  return {std::move(next), std::move(rec)};
}

BisonsTrajectory run_bisons(std::span<const ReturnsVec> returns, const BisonsParams& params,
                            double tol, const BisonsObserver& observer) {
  require(static_cast<long long>(returns.size()) <= params.T, Errc::kInvalidArgument,
          "sequence is longer than the horizon T");
  BisonsTrajectory traj;
  BisonsRunner runner(params, tol);
  traj.rounds.reserve(returns.size());
  BisonsRoundDetail detail;
  for (const ReturnsVec& r : returns) {
    RoundRecord rec = runner.step(r, observer ? &detail : nullptr);
    if (observer) observer(rec, detail);
    if (rec.reset_triggered) {
      traj.reset_times.push_back(rec.t);
      ++traj.completed_epochs;
    }
    traj.rounds.push_back(std::move(rec));
  }
  return traj;
}

BisonsMonitor::BisonsMonitor(const BisonsParams& params, double tol)
    : params_(params), tol_(tol) {}

void BisonsMonitor::observe(const RoundRecord& rec, const BisonsRoundDetail& dt) {
  ++rounds;
  const double k = 1.0 + 6.0 * params_.eta;
  const double t2 = static_cast<double>(params_.T) * static_cast<double>(params_.T);
  bool stab = false, growth = false, dbl = false, range = false, dom = false;
  for (int i = 0; i < params_.d; ++i) {
    const double xc = dt.x_cur[i], xn = dt.x_next[i];
    if (xc > k * xn + tol_ || xn > k * xc + tol_) stab = true;
    if (dt.p_next[i] > k * dt.p_cur[i] + tol_) growth = true;
    if (rec.tau >= 2 && dt.u_next[i] > 2.0 * dt.u_cur[i] + tol_) dbl = true;
    if (dt.p_next[i] > t2) range = true;
    if (dt.p_next[i] < 1.0 / xn - tol_ || dt.p_next[i] < dt.p_cur[i]) dom = true;
  }
  stability_violations += stab;
  bias_growth_violations += growth;
  doubling_violations += dbl;
  range_violations += range;
  dominance_violations += dom;

  epoch_cost_ += dt.x_cur.weights().dot(dt.p_cur - dt.p_prev);
  epoch_last_p_ = dt.p_cur;
  if (rec.reset_triggered) finish();
}

void BisonsMonitor::finish() {
  if (epoch_last_p_.size() == 0) return;
  const double bound = (epoch_last_p_.array() / params_.d).log().sum();
  const double slack = epoch_cost_ - bound;
  worst_cost_slack = std::max(worst_cost_slack, slack);
  if (slack > tol_) ++cost_violations;
  epoch_cost_ = 0.0;
  epoch_last_p_.resize(0);
}

long long BisonsMonitor::total_violations() const {
  return stability_violations + bias_growth_violations + doubling_violations +
         range_violations + dominance_violations + cost_violations;
}

}  // namespace bisons
