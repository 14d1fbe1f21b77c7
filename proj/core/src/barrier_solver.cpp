#include "bisons/barrier_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace bisons {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Region of the scaled Newton decrement in which lambda^2 bounds the gap.
constexpr double kCertifiedRegion = 0.68;
// Below this scaled decrement full Newton steps are taken without a search.
constexpr double kQuadraticRegion = 0.25;
constexpr double kMinStep = 1e-20;

struct Direction {
  Vec step;
  double decrement_sq = 0.0;
};

Vec solve_spd(const Mat& h, const Vec& rhs) {
  Eigen::LLT<Mat> llt(h);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  Eigen::LDLT<Mat> ldlt(h);
  if (ldlt.info() != Eigen::Success) fail(Errc::kNumeric, "Newton system is singular");
  return ldlt.solve(rhs);
}

const Mat& tangent_basis(int d) {
  thread_local std::map<int, Mat> cache;
  auto it = cache.find(d);
  if (it == cache.end()) {
    it = cache.emplace(d, PiProjection(d).basis().transpose()).first;
  }
  return it->second;
}

struct SimplexOps {
  const QuadraticObjective& obj;
  const Mat& tangent;

  double barrier(const Vec& x) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0)) return kInf;
      s -= std::log(x[i]);
    }
    return s;
  }

  double value(const Vec& x) const {
    const double b = barrier(x);
    if (!std::isfinite(b)) return kInf;
    return obj.smooth_value(x) + obj.barrier_weight() * b;
  }

  void derivatives(const Vec& x, Vec& g, Mat& h) const {
    const double mu = obj.barrier_weight();
    g = obj.smooth_gradient(x);
    h = obj.smooth_hessian(x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      g[i] -= mu / x[i];
      h(i, i) += mu / (x[i] * x[i]);
    }
  }

  Direction direction(const Vec& g, const Mat& h) const {
    const Vec gr = tangent.transpose() * g;
    const Mat hr = tangent.transpose() * h * tangent;
    const Vec dz = -solve_spd(hr, gr);
    return {tangent * dz, -gr.dot(dz)};
  }

  double max_step(const Vec& x, const Vec& dx) const {
    double a = kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
    }
    return a;
  }
};

struct SpectraplexOps {
  const QuadraticObjective& obj;
  int d;
  Vec trace_row;

  SpectraplexOps(const QuadraticObjective& o, int dim) : obj(o), d(dim) {
    trace_row = Vec::Zero(d * d);
    trace_row.tail(d).setOnes();
  }

  double barrier(const Vec& v) const {
    const HermitianMatrix x = unvectorize_phi(v, d);
    Eigen::LLT<CMat> llt(x.matrix());
    if (llt.info() != Eigen::Success) return kInf;
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double l = llt.matrixL()(i, i).real();
      if (!(l > 0.0)) return kInf;
      s -= 2.0 * std::log(l);
    }
    return s;
  }

  double value(const Vec& v) const {
    const double b = barrier(v);
    if (!std::isfinite(b)) return kInf;
    return obj.smooth_value(v) + obj.barrier_weight() * b;
  }

  void derivatives(const Vec& v, Vec& g, Mat& h) const {
    const double mu = obj.barrier_weight();
    const HermitianMatrix x = unvectorize_phi(v, d);
    Eigen::LLT<CMat> llt(x.matrix());
    if (llt.info() != Eigen::Success) fail(Errc::kInteriority, "iterate left the PD cone");
    const HermitianMatrix x_inv =
        make_hermitian_unchecked(llt.solve(CMat::Identity(d, d)));
    g = obj.smooth_gradient(v) - mu * phi_functional(x_inv);
    h = obj.smooth_hessian(v) + mu * logdet_hessian_phi(x_inv);
  }

  Direction direction(const Vec& g, const Mat& h) const {
    Eigen::LLT<Mat> llt(h);
    if (llt.info() != Eigen::Success) fail(Errc::kNumeric, "Newton system is singular");
    const Vec hg = llt.solve(g);
    const Vec hc = llt.solve(trace_row);
    const double nu = -trace_row.dot(hg) / trace_row.dot(hc);
    Vec step = -(hg + nu * hc);
    return {step, -g.dot(step)};
  }

  double max_step(const Vec& v, const Vec& dv) const {
    const HermitianMatrix x = unvectorize_phi(v, d);
    const HermitianMatrix dx = unvectorize_phi(dv, d);
    Eigen::LLT<CMat> llt(x.matrix());
    if (llt.info() != Eigen::Success) return 0.0;
    const CMat l_inv = llt.matrixL().solve(CMat::Identity(d, d));
    const CMat m = l_inv * dx.matrix() * l_inv.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    return lo < 0.0 ? -1.0 / lo : kInf;
  }
};

struct NewtonOutcome {
  Vec point;
  double value;
  double gap;
  int iterations;
  std::vector<double> trace;
};

template <typename Ops>
NewtonOutcome newton(const Ops& ops, Vec v, double tol, const SolverOptions& opt) {
  if (!(tol > 0.0)) fail(Errc::kInvalidArgument, "solver tolerance must be positive");
  const double mu = ops.obj.barrier_weight();
  const double scale = std::max(1.0, 1.0 / std::sqrt(mu));
  double f = ops.value(v);
  if (!std::isfinite(f)) {
    fail(Errc::kInteriority, "warm start is not in the interior of the domain");
  }
  NewtonOutcome out{v, f, kInf, 0, {}};
  if (opt.record_trace) out.trace.push_back(f);
  Vec g;
  Mat h;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    ops.derivatives(v, g, h);
    const Direction dir = ops.direction(g, h);
    const double lam_sq = std::max(dir.decrement_sq, 0.0);
    const double lam_scaled = std::sqrt(lam_sq) * scale;
    const double gap = lam_scaled <= kCertifiedRegion ? lam_sq : kInf;
    if (f <= out.value) {
      out.point = v;
      out.value = f;
      out.gap = gap;
    }
    out.iterations = it;
    if (gap <= tol) return out;
    if (it == opt.max_iterations) break;

    double alpha = std::min(1.0, opt.fraction_to_boundary * ops.max_step(v, dir.step));
    Vec next = v + alpha * dir.step;
    double f_next = ops.value(next);
    if (lam_scaled >= kQuadraticRegion) {
      const double slope = -lam_sq;
      while (!(f_next <= f + opt.armijo * alpha * slope) && alpha > kMinStep) {
        alpha *= opt.backtrack;
        next = v + alpha * dir.step;
        f_next = ops.value(next);
      }
    } else {
      while (!std::isfinite(f_next) && alpha > kMinStep) {
        alpha *= opt.backtrack;
        next = v + alpha * dir.step;
        f_next = ops.value(next);
      }
    }
    if (alpha <= kMinStep || !std::isfinite(f_next)) break;
    v = std::move(next);
    f = f_next;
    if (opt.record_trace) out.trace.push_back(f);
  }
  throw SolverFailure("Newton solver did not reach gap " + std::to_string(tol) +
                          " (best certified gap " + std::to_string(out.gap) + ")",
                      out.point, out.value, out.gap);
}

int spectraplex_side(int dim) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
  if (d * d != dim) fail(Errc::kDimensionMismatch, "spectraplex objective needs d^2 coordinates");
  return d;
}

}  // namespace

QuadraticObjective::QuadraticObjective(int dim, double barrier_weight)
    : quad_(Mat::Zero(dim, dim)), lin_(Vec::Zero(dim)) {
  require(dim >= 1, Errc::kInvalidArgument, "QuadraticObjective: dimension must be positive");
  set_barrier_weight(barrier_weight);
}

void QuadraticObjective::set_barrier_weight(double w) {
  require(w > 0.0 && std::isfinite(w), Errc::kParameter, "barrier weight must be positive");
  barrier_weight_ = w;
}

void QuadraticObjective::add_surrogate(const Vec& g, double anchor_value,
                                       double g_at_anchor, double curvature) {
  if (g.size() != lin_.size()) fail(Errc::kDimensionMismatch, "add_surrogate: dimension mismatch");
  // value + (gv - a) + c/2 (gv - a)^2
  //   = value - a + c/2 a^2 + (1 - c a) gv + c/2 (gv)^2
  quad_.noalias() += curvature * g * g.transpose();
  lin_ += (1.0 - curvature * g_at_anchor) * g;
  constant_ += anchor_value - g_at_anchor + 0.5 * curvature * g_at_anchor * g_at_anchor;
}

void QuadraticObjective::add_linear(const Vec& coef) {
  if (coef.size() != lin_.size()) fail(Errc::kDimensionMismatch, "add_linear: dimension mismatch");
  lin_ += coef;
}

void QuadraticObjective::add_log_term(const Vec& a, double weight) {
  if (a.size() != lin_.size()) fail(Errc::kDimensionMismatch, "add_log_term: dimension mismatch");
  require(weight > 0.0, Errc::kInvalidArgument, "add_log_term: weight must be positive");
  log_a_.push_back(a);
  log_w_.push_back(weight);
}

double QuadraticObjective::smooth_value(const Vec& v) const {
  double f = constant_ + lin_.dot(v) + 0.5 * v.dot(quad_ * v);
  for (std::size_t s = 0; s < log_a_.size(); ++s) {
    const double inner = log_a_[s].dot(v);
    if (!(inner > 0.0)) return kInf;
    f -= log_w_[s] * std::log(inner);
  }
  return f;
}

Vec QuadraticObjective::smooth_gradient(const Vec& v) const {
  Vec g = lin_ + quad_ * v;
  for (std::size_t s = 0; s < log_a_.size(); ++s) {
    g -= (log_w_[s] / log_a_[s].dot(v)) * log_a_[s];
  }
  return g;
}

Mat QuadraticObjective::smooth_hessian(const Vec& v) const {
  Mat h = quad_;
  for (std::size_t s = 0; s < log_a_.size(); ++s) {
    const double inner = log_a_[s].dot(v);
    h.noalias() += (log_w_[s] / (inner * inner)) * log_a_[s] * log_a_[s].transpose();
  }
  return h;
}

void QuadraticObjective::reset() {
  quad_.setZero();
  lin_.setZero();
  constant_ = 0.0;
  log_a_.clear();
  log_w_.clear();
}

double default_tolerance(long long horizon) {
  const double t = static_cast<double>(std::max(1LL, horizon));
  return std::min(1e-10, 1.0 / (t * t));
}

SimplexReport minimize_simplex(const QuadraticObjective& obj, const Portfolio& warm_start,
                               double tol, const SolverOptions& options) {
  if (warm_start.dim() != obj.dim()) {
    fail(Errc::kDimensionMismatch, "minimize_simplex: warm start dimension mismatch");
  }
  const SimplexOps ops{obj, tangent_basis(obj.dim())};
  NewtonOutcome r = newton(ops, warm_start.weights(), tol, options);
  return {Portfolio::from_solver(std::move(r.point)), r.value, r.gap, r.iterations,
          std::move(r.trace)};
}

SpectraplexReport minimize_spectraplex(const QuadraticObjective& obj,
                                       const QuantumState& warm_start, double tol,
                                       const SolverOptions& options) {
  const int d = spectraplex_side(obj.dim());
  if (warm_start.dim() != d) {
    fail(Errc::kDimensionMismatch, "minimize_spectraplex: warm start dimension mismatch");
  }
  const SpectraplexOps ops(obj, d);
  NewtonOutcome r = newton(ops, vectorize_phi(warm_start.matrix()), tol, options);
  return {QuantumState(unvectorize_phi(r.point, d)), r.value, r.gap, r.iterations,
          std::move(r.trace)};
}

double objective_value(const QuadraticObjective& obj, const Vec& v, Domain domain) {
  if (domain == Domain::kSimplex) return SimplexOps{obj, tangent_basis(obj.dim())}.value(v);
  return SpectraplexOps(obj, spectraplex_side(obj.dim())).value(v);
}

Vec objective_gradient(const QuadraticObjective& obj, const Vec& v, Domain domain) {
  Vec g;
  Mat h;
  if (domain == Domain::kSimplex) {
    SimplexOps{obj, tangent_basis(obj.dim())}.derivatives(v, g, h);
  } else {
    SpectraplexOps(obj, spectraplex_side(obj.dim())).derivatives(v, g, h);
  }
  return g;
}

}  // namespace bisons
