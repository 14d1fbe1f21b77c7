#include "bisons/lbftrl.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

namespace bisons {

// ---- player ---------------------------------------------------------------

LbftrlState::LbftrlState(int d, double eta, long long horizon, double tol)
    : d_(d),
      eta_(eta),
      tol_(tol > 0.0 ? tol : default_tolerance(horizon)),
      obj_(d, 1.0 / eta),
      x_(Portfolio::uniform(d)) {
  require(d >= 2, Errc::kInvalidArgument, "LB-FTRL needs d >= 2");
  require(eta > 0.0 && std::isfinite(eta), Errc::kParameter, "eta must be positive");
}

void LbftrlState::observe(const ReturnsVec& r) {
  require(r.dim() == d_, Errc::kDimensionMismatch, "returns dimension differs from d");
  history_.push_back(r.values());
  obj_.add_log_term(r.values());
  x_ = minimize_simplex(obj_, x_, tol_).minimizer;
}

Vec LbftrlState::gradient(const Vec& x) const {
  return objective_gradient(obj_, x, Domain::kSimplex);
}

Portfolio lbftrl_play(const LbftrlState& state) {
  return minimize_simplex(state.objective(), Portfolio::uniform(state.dim()),
                          state.tolerance())
      .minimizer;
}

// ---- exact target sequence -----------------------------------------------

Rational::Rational(std::int64_t n, std::int64_t d) {
  require(d != 0, Errc::kInvalidArgument, "Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num = g == 0 ? 0 : n / g;
  den = g == 0 ? 1 : d / g;
}

Rational Rational::operator+(const Rational& o) const {
  const std::int64_t l = std::lcm(den, o.den);
  return Rational(num * (l / den) + o.num * (l / o.den), l);
}

Rational Rational::operator*(const Rational& o) const {
  const std::int64_t g1 = std::gcd(num, o.den);
  const std::int64_t g2 = std::gcd(o.num, den);
  const std::int64_t a = g1 == 0 ? num : num / g1;
  const std::int64_t b = g2 == 0 ? o.num : o.num / g2;
  const std::int64_t c = g2 == 0 ? den : den / g2;
  const std::int64_t e = g1 == 0 ? o.den : o.den / g1;
  return Rational(a * b, c * e);
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational rational_inner(const RationalVec& a, const RationalVec& b) {
  require(a.size() == b.size(), Errc::kDimensionMismatch, "rational_inner: size mismatch");
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

std::vector<TargetPair> build_target_sequence(int d) {
  require(d >= 2 && d <= 12, Errc::kInvalidArgument, "target sequence needs 2 <= d <= 12");
  std::vector<TargetPair> seq;
  for (int k = 1; k < d; ++k) {
    // supports of size k in lexicographic order
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      TargetPair tp;
      tp.support = k;
      tp.target.assign(d, Rational(0));
      tp.outcome.assign(d, Rational(1, d - k));
      for (int i : idx) {
        tp.target[i] = Rational(1, k);
        tp.outcome[i] = Rational(0);
      }
      seq.push_back(std::move(tp));
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == d - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return seq;
}

ValidityReport check_sequence_validity(const std::vector<TargetPair>& seq, int d) {
  ValidityReport rep;
  rep.length = seq.size();
  const Rational floor_value(1, static_cast<std::int64_t>(d) * d);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!(rational_inner(seq[i].target, seq[i].outcome) == Rational(0)) && rep.valid) {
      rep.valid = false;
      rep.bad_i = rep.bad_j = static_cast<int>(i);
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Rational v = rational_inner(seq[i].target, seq[j].outcome);
      if (v < rep.min_cross) rep.min_cross = v;
      if (v < floor_value && rep.valid) {
        rep.valid = false;
        rep.bad_i = static_cast<int>(i);
        rep.bad_j = static_cast<int>(j);
      }
    }
  }
  return rep;
}

Vec to_vec(const RationalVec& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].value();
  return out;
}

AdversaryPlan make_plan(int d, long long T, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, Errc::kParameter, "alpha must lie in (0, 1)");
  require(T >= 2, Errc::kParameter, "horizon must be at least 2");
  AdversaryPlan plan;
  plan.d = d;
  plan.alpha = alpha;
  plan.T = T;
  plan.targets = build_target_sequence(d);
  const double log2t = std::log2(static_cast<double>(T));
  plan.layer_count = static_cast<int>(std::floor(alpha * log2t / 3.0));
  plan.repetitions = static_cast<long long>(std::floor(std::pow(static_cast<double>(T), alpha)));
  const double t_alpha = std::pow(static_cast<double>(T), -alpha);
  for (int s = 0; s <= plan.layer_count; ++s) {
    plan.scaling.push_back(1.0 - std::ldexp(t_alpha, s));
  }
  for (double c : plan.scaling) {
    require(c > 0.0 && c < 1.0, Errc::kParameter, "scaling factor left (0, 1)");
  }
  return plan;
}

void write_plan(std::ostream& out, const AdversaryPlan& plan) {
  auto row = [&](const RationalVec& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i].str();
  };
  for (const TargetPair& tp : plan.targets) {
    row(tp.target);
    out << ';';
    row(tp.outcome);
    out << '\n';
  }
}

// ---- adversary primitives -------------------------------------------------

Vec pull_to_center(const Vec& x, double c_s) {
  const double d = static_cast<double>(x.size());
  return (c_s * x.array() + (1.0 - c_s) / d).matrix();
}

Portfolio pull_to_center(const Portfolio& x, int s, const AdversaryPlan& plan) {
  require(s >= 0 && s <= plan.layer_count, Errc::kInvalidArgument, "layer out of range");
  return Portfolio::from_solver(pull_to_center(x.weights(), plan.c(s)));
}

ReturnsVec move_to_x(const PiProjection& proj, const Vec& target, const Vec& grad_pi,
                     long long T) {
  const double norm = grad_pi.norm();
  if (norm == 0.0) return normalize_returns(proj.center());
  const double d = proj.dim();
  double scale = 1.0 / (std::sqrt(static_cast<double>(T)) * norm);
  const double slack = 1.0 - grad_pi.dot(proj.project(target));
  if (slack > 0.0) scale = std::min(scale, 1.0 / (d * slack));
  const PiProjection::Lifted lifted = proj.lift_checked(scale * grad_pi);
  if (!lifted.in_simplex) {
    fail(Errc::kInfeasibleMovement, "movement return has a negative entry");
  }
  return normalize_returns(lifted.point);
}

Vec loss_gradient_pi(const PiProjection& proj, const Vec& x, const Vec& r) {
  const double y = x.dot(r);
  if (!(y >= 1e-300)) fail(Errc::kInfiniteLoss, "<x, r> vanished");
  return proj.project(r) * (-1.0 / y);
}

Mat lbftrl_hessian_pi(const PiProjection& proj, const Vec& x, const std::vector<Vec>& history,
                      double eta) {
  const int d = proj.dim();
  Mat h = Mat::Zero(d, d);
  for (const Vec& r : history) {
    const double y = x.dot(r);
    h.noalias() += (1.0 / (y * y)) * r * r.transpose();
  }
  h.diagonal() += (1.0 / eta) * x.array().square().inverse().matrix();
  return proj.basis() * h * proj.basis().transpose();
}

double stability_term(const Vec& grad_pi, const Mat& hessian_pi) {
  Eigen::LLT<Mat> llt(hessian_pi);
  if (llt.info() != Eigen::Success) fail(Errc::kNumeric, "stability_term: Hessian is not PD");
  return grad_pi.dot(llt.solve(grad_pi));
}

double stability_term(const PiProjection& proj, const Vec& x, const Vec& r,
                      const Mat& hessian_pi) {
  return stability_term(loss_gradient_pi(proj, x, r), hessian_pi);
}

// ---- runs -----------------------------------------------------------------

namespace {

class Driver {
 public:
  Driver(int d, double eta, long long horizon, double tol)
      : proj_(d), state_(d, eta, horizon, tol), horizon_(horizon) {}

  const PiProjection& proj() const { return proj_; }
  const LbftrlState& state() const { return state_; }
  LbftrlRun& run() { return run_; }
  bool exhausted() const { return t_ >= horizon_; }

  // Plays one round; the stability term uses the Hessian of F_{t+1} at x_t.
  void play(const ReturnsVec& r, ReturnKind kind, int target, int layer, long long rep) {
    ++t_;
    const Vec x = state_.x().weights();
    LbftrlRound rd;
    rd.t = t_;
    rd.x = x;
    rd.r = r.values();
    rd.loss = log_loss(x, r.values());
    rd.kind = kind;
    rd.target = target;
    rd.layer = layer;
    rd.repetition = rep;
    const double y = x.dot(r.values());
    rd.hessian_trace = proj_.project(r.values()).squaredNorm() / (y * y);

    state_.observe(r);
    StabilityRecord sr;
    sr.t = t_;
    sr.grad_pi = loss_gradient_pi(proj_, x, r.values());
    sr.hessian_pi = lbftrl_hessian_pi(proj_, x, state_.history(), state_.eta());
    sr.term = stability_term(sr.grad_pi, sr.hessian_pi);

    run_.learner_loss += rd.loss;
    run_.stability_sum += sr.term;
    if (kind == ReturnKind::kMovement) ++run_.movement_steps;
    if (kind == ReturnKind::kOutcome) ++run_.outcome_steps;
    run_.rounds.push_back(std::move(rd));
    run_.stability.push_back(std::move(sr));
  }

  LbftrlRun finish() {
    run_.final_x = state_.x();
    double comp = 0.0;
    for (const LbftrlRound& rd : run_.rounds) comp += log_loss(run_.final_x.weights(), rd.r);
    run_.comparator_loss = comp;
    run_.regret = run_.learner_loss - comp;
    return std::move(run_);
  }

 private:
  PiProjection proj_;
  LbftrlState state_;
  long long horizon_;
  long long t_ = 0;
  LbftrlRun run_;
};

// grad_Pi F(target) = 0 up to rounding in the sum of its terms.
bool at_target(const LbftrlState& st, const Vec& target, const Vec& grad_pi) {
  double scale = (1.0 / st.eta()) * target.cwiseInverse().norm();
  for (const Vec& r : st.history()) scale += r.norm() / target.dot(r);
  return grad_pi.norm() <= 1e-12 * scale;
}

}  // namespace

LbftrlRun generate_and_run(const AdversaryPlan& plan, double eta, double tol) {
  Driver drv(plan.d, eta, plan.T, tol);
  const double sqrt_t = std::sqrt(static_cast<double>(plan.T));
  for (std::size_t i = 0; i < plan.targets.size(); ++i) {
    const Vec t_i = to_vec(plan.targets[i].target);
    const Vec o_i = to_vec(plan.targets[i].outcome);
    for (long long k = 1; k <= plan.repetitions; ++k) {
      for (int s = 1; s <= plan.layer_count; ++s) {
        const Vec target = pull_to_center(t_i, plan.c(s));
        Vec g = drv.proj().project(drv.state().gradient(target));
        const double bound = 2.0 * sqrt_t * g.norm() / plan.d + 1.0;
        long long steps = 0;
        while (!at_target(drv.state(), target, g)) {
          if (drv.exhausted()) {
            drv.run().truncated = true;
            return drv.finish();
          }
          drv.play(move_to_x(drv.proj(), target, g, plan.T), ReturnKind::kMovement,
                   static_cast<int>(i), s, k);
          ++steps;
          g = drv.proj().project(drv.state().gradient(target));
        }
        drv.run().longest_move = std::max(drv.run().longest_move, steps);
        if (static_cast<double>(steps) > bound) ++drv.run().move_bound_violations;
        if (drv.exhausted()) {
          drv.run().truncated = true;
          return drv.finish();
        }
        drv.play(normalize_returns(pull_to_center(o_i, plan.c(s))), ReturnKind::kOutcome,
                 static_cast<int>(i), s, k);
      }
    }
  }
  return drv.finish();
}

LbftrlRun run_lbftrl(const std::vector<ReturnsVec>& returns, double eta, long long horizon,
                     double tol) {
  require(!returns.empty(), Errc::kInvalidArgument, "run_lbftrl: empty sequence");
  require(static_cast<long long>(returns.size()) <= horizon, Errc::kInvalidArgument,
          "sequence is longer than the horizon");
  Driver drv(returns.front().dim(), eta, horizon, tol);
  for (const ReturnsVec& r : returns) drv.play(r, ReturnKind::kExternal, -1, -1, -1);
  return drv.finish();
}

}  // namespace bisons
