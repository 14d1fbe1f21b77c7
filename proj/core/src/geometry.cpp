#include "bisons/geometry.hpp"

#include <limits>
#include <string>

#include "bisons/error.hpp"

namespace bisons {

namespace {

constexpr double kSumTol = 1e-12;
constexpr double kMinInner = 1e-300;

void check_simplex(const Vec& w, const char* what) {
  if (w.size() < 2) {
    fail(Errc::kInvalidArgument, std::string(what) + ": dimension must be >= 2");
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
      fail(Errc::kInvalidArgument,
           std::string(what) + ": entry " + std::to_string(i) +
               " is negative or not finite");
    }
  }
  if (std::abs(w.sum() - 1.0) > kSumTol) {
    fail(Errc::kInvalidArgument,
         std::string(what) + ": entries do not sum to one");
  }
}

}  // namespace

Portfolio::Portfolio(Vec weights) : w_(std::move(weights)) {
  check_simplex(w_, "Portfolio");
}

Portfolio Portfolio::uniform(int d) {
  require(d >= 2, Errc::kInvalidArgument, "Portfolio: dimension must be >= 2");
  return Portfolio(Vec::Constant(d, 1.0 / d));
}

Portfolio Portfolio::vertex(int d, int i) {
  require(d >= 2 && i >= 0 && i < d, Errc::kInvalidArgument,
          "Portfolio::vertex: index out of range");
  Vec w = Vec::Zero(d);
  w[i] = 1.0;
  return Portfolio(std::move(w));
}

Portfolio Portfolio::from_solver(Vec weights) {
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0 && weights[i] > -kSumTol) weights[i] = 0.0;
  }
  const double s = weights.sum();
  if (s > 0.0 && std::abs(s - 1.0) <= kSumTol) weights /= s;
  return Portfolio(std::move(weights));
}

ReturnsVec normalize_returns(const Vec& raw) {
  if (raw.size() == 0) fail(Errc::kInvalidReturns, "returns vector is empty");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= 0.0) || !std::isfinite(raw[i])) {
      fail(Errc::kInvalidReturns, "returns entry " + std::to_string(i) +
                                      " is negative or not finite");
    }
    sum += raw[i];
  }
  if (!(sum > 0.0)) fail(Errc::kInvalidReturns, "returns vector is all zero");
  const double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(sum - 1.0) <= 4.0 * eps * static_cast<double>(raw.size())) {
    return ReturnsVec(raw);
  }
  return ReturnsVec(raw / sum);
}

ReturnsVec normalize_returns(std::span<const double> raw) {
  Vec v(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) v[static_cast<Eigen::Index>(i)] = raw[i];
  return normalize_returns(v);
}

double log_loss(const Vec& x, const Vec& r) {
  if (x.size() != r.size()) {
    fail(Errc::kDimensionMismatch, "log_loss: dimension mismatch");
  }
  const double inner = x.dot(r);
  if (!(inner >= kMinInner)) {
    fail(Errc::kInfiniteLoss, "log_loss: <x, r> vanishes");
  }
  return -std::log(inner);
}

double log_loss(const Portfolio& x, const ReturnsVec& r) {
  return log_loss(x.weights(), r.values());
}

Vec log_loss_gradient(const Vec& x, const Vec& r) {
  const double inner = x.dot(r);
  if (!(inner >= kMinInner)) {
    fail(Errc::kInfiniteLoss, "log_loss_gradient: <x, r> vanishes");
  }
  return -r / inner;
}

void validate_beta(double beta) {
  if (!(beta > 0.0) || beta > kMaxBeta) {
    fail(Errc::kParameter, "beta must lie in (0, sqrt(2)-1], got " +
                               std::to_string(beta));
  }
}

SurrogateQuad build_surrogate(const Portfolio& x_t, const ReturnsVec& r_t,
                              double beta) {
  validate_beta(beta);
  if (x_t.dim() != r_t.dim()) {
    fail(Errc::kDimensionMismatch, "build_surrogate: dimension mismatch");
  }
  SurrogateQuad s;
  s.anchor_reward = x_t.weights().dot(r_t.values());
  if (!(s.anchor_reward >= kMinInner)) {
    fail(Errc::kInfiniteLoss, "build_surrogate: <x_t, r_t> vanishes");
  }
  s.anchor_value = -std::log(s.anchor_reward);
  s.anchor_grad = -r_t.values() / s.anchor_reward;
  s.anchor_point = x_t.weights();
  s.curvature = beta;
  return s;
}

double SurrogateQuad::eval(const Vec& x) const {
  const double lin = (x - anchor_point).dot(anchor_grad);
  return anchor_value + lin + 0.5 * curvature * lin * lin;
}

Vec SurrogateQuad::gradient(const Vec& x) const {
  const double lin = (x - anchor_point).dot(anchor_grad);
  return (1.0 + curvature * lin) * anchor_grad;
}

double surrogate_profile(double y, double beta, double l) {
  const double dh = -1.0 / y;
  const double dl = l - y;
  return -std::log(y) + dl * dh + 0.5 * beta * dl * dl * dh * dh;
}

double lower_surrogate_profile(double y, double beta, double l) {
  const double kink = y / beta;
  if (l <= kink) return surrogate_profile(y, beta, l);
  // hhat'(kink) = -1/y + beta (kink - y) / y^2 = -beta / y
  return surrogate_profile(y, beta, kink) - beta / y * (l - kink);
}

double lower_surrogate_eval(const SurrogateQuad& s, const Portfolio& x,
                            const ReturnsVec& r) {
  if (x.dim() != r.dim() || x.dim() != s.anchor_point.size()) {
    fail(Errc::kDimensionMismatch, "lower_surrogate_eval: dimension mismatch");
  }
  const double l = x.weights().dot(r.values());
  if (l <= s.anchor_reward / s.curvature) return s.eval(x);
  return lower_surrogate_profile(s.anchor_reward, s.curvature, l);
}

PiProjection::PiProjection(int d) : d_(d) {
  require(d >= 2, Errc::kInvalidArgument, "PiProjection: dimension must be >= 2");
  center_ = Vec::Constant(d, 1.0 / d);
  basis_ = Mat::Zero(d - 1, d);
  const Vec ones_unit = Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  for (int i = 0; i < d - 1; ++i) {
    Vec v = Vec::Zero(d);
    v[i] = 1.0;
    v[d - 1] = -1.0;
    // Two Gram-Schmidt passes keep the rows orthonormal to ~1e-16.
    for (int pass = 0; pass < 2; ++pass) {
      v -= ones_unit.dot(v) * ones_unit;
      for (int j = 0; j < i; ++j) {
        v -= basis_.row(j).dot(v) * basis_.row(j).transpose();
      }
    }
    basis_.row(i) = v.normalized().transpose();
  }
}

PiProjection PiProjection::from_basis(Mat basis) {
  const int d = static_cast<int>(basis.cols());
  require(d >= 2 && basis.rows() == d - 1, Errc::kInvalidArgument,
          "PiProjection::from_basis: basis must be (d-1) x d");
  const Mat gram = basis * basis.transpose();
  require((gram - Mat::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff() <= 1e-10,
          Errc::kInvalidArgument, "PiProjection::from_basis: rows not orthonormal");
  require((basis * Vec::Ones(d)).cwiseAbs().maxCoeff() <= 1e-10,
          Errc::kInvalidArgument,
          "PiProjection::from_basis: rows not orthogonal to the all-ones vector");
  PiProjection p;
  p.d_ = d;
  p.basis_ = std::move(basis);
  p.center_ = Vec::Constant(d, 1.0 / d);
  return p;
}

Vec PiProjection::project(const Vec& x) const {
  if (x.size() != d_) fail(Errc::kDimensionMismatch, "project: dimension mismatch");
  return basis_ * x;
}

Vec PiProjection::lift(const Vec& v) const {
  if (v.size() != d_ - 1) fail(Errc::kDimensionMismatch, "lift: dimension mismatch");
  return basis_.transpose() * v + center_;
}

PiProjection::Lifted PiProjection::lift_checked(const Vec& v) const {
  Lifted out{lift(v), true};
  out.in_simplex = out.point.minCoeff() >= 0.0;
  return out;
}

}  // namespace bisons
