#pragma once

// Simplex geometry for online portfolio selection: portfolios, normalized
// returns, the log loss, the quadratic surrogate and its lower extension, and
// the orthonormal projection onto the simplex tangent space.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

namespace bisons {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Largest admissible surrogate curvature, sqrt(2) - 1.
inline const double kMaxBeta = std::sqrt(2.0) - 1.0;

/// A point of the probability simplex in R^d, d >= 2.
class Portfolio {
 public:
  /// Validates nonnegativity and unit sum (within 1e-12).
  explicit Portfolio(Vec weights);

  /// The barycenter 1/d of the simplex.
  static Portfolio uniform(int d);
  /// Basis vector e_i.
  static Portfolio vertex(int d, int i);
  /// Clips tiny negative round-off, rescales to unit sum, then validates.
  /// Intended for solver output that already lies on the simplex up to 1e-12.
  static Portfolio from_solver(Vec weights);

  int dim() const { return static_cast<int>(w_.size()); }
  const Vec& weights() const { return w_; }
  double operator[](int i) const { return w_[i]; }
  double min_entry() const { return w_.minCoeff(); }
  bool interior() const { return w_.minCoeff() > 0.0; }

 private:
  Vec w_;
};

/// A nonnegative returns vector rescaled to lie on the simplex.
class ReturnsVec {
 public:
  int dim() const { return static_cast<int>(r_.size()); }
  const Vec& values() const { return r_; }
  double operator[](int i) const { return r_[i]; }

 private:
  friend ReturnsVec normalize_returns(const Vec& raw);
  explicit ReturnsVec(Vec r) : r_(std::move(r)) {}
  Vec r_;
};

/// Rescales `raw` onto the simplex. Input that already sums to one within a
/// few ulps is kept bit-for-bit so saved traces reload identically.
/// Throws Errc::kInvalidReturns on negative, non-finite or all-zero input.
ReturnsVec normalize_returns(const Vec& raw);
ReturnsVec normalize_returns(std::span<const double> raw);

/// -log <x, r>. Throws Errc::kInfiniteLoss when <x, r> < 1e-300.
double log_loss(const Portfolio& x, const ReturnsVec& r);
/// Same contract on raw vectors; used by solvers and oracles.
double log_loss(const Vec& x, const Vec& r);

/// Gradient of the log loss, -r / <x, r>.
Vec log_loss_gradient(const Vec& x, const Vec& r);

/// Quadratic model of the log loss anchored at the played point:
///   f(x) = f_t(x_t) + <x - x_t, g> + beta/2 <x - x_t, g>^2,  g = grad f_t(x_t).
struct SurrogateQuad {
  double anchor_value = 0.0;
  Vec anchor_grad;
  Vec anchor_point;
  double anchor_reward = 0.0;  // y_t = <x_t, r_t>
  double curvature = 0.0;      // beta

  double eval(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  double eval(const Portfolio& x) const { return eval(x.weights()); }
};

/// Throws Errc::kParameter unless beta lies in (0, sqrt(2) - 1].
void validate_beta(double beta);

SurrogateQuad build_surrogate(const Portfolio& x_t, const ReturnsVec& r_t,
                              double beta);

/// Scalar profile of the surrogate in terms of l = <x, r>:
///   hhat(l) = h(y) + (l - y) h'(y) + beta/2 (l - y)^2 h'(y)^2,  h = -log.
double surrogate_profile(double y, double beta, double l);
/// hhat for l <= y/beta, continued linearly beyond that kink.
double lower_surrogate_profile(double y, double beta, double l);

/// The lower extension of the surrogate evaluated at x. `r` must be the
/// returns vector the surrogate was built from.
double lower_surrogate_eval(const SurrogateQuad& s, const Portfolio& x,
                            const ReturnsVec& r);

/// Orthonormal coordinates on the hyperplane sum(x) = 1 centred at 1/d.
/// The rows of `basis()` are orthonormal and orthogonal to the all-ones
/// vector; they come from Gram-Schmidt on e_i - e_d, i < d.
class PiProjection {
 public:
  explicit PiProjection(int d);
  /// Uses a caller-supplied basis (rows orthonormal, orthogonal to 1).
  static PiProjection from_basis(Mat basis);

  int dim() const { return d_; }
  const Mat& basis() const { return basis_; }
  const Vec& center() const { return center_; }

  /// basis * x. Also valid for gradients and returns vectors.
  Vec project(const Vec& x) const;
  Vec project(const Portfolio& x) const { return project(x.weights()); }
  /// basis^T v + center.
  Vec lift(const Vec& v) const;

  struct Lifted {
    Vec point;
    bool in_simplex;
  };
  /// lift() plus a flag telling whether the point has no negative entry.
  Lifted lift_checked(const Vec& v) const;

 private:
  PiProjection() = default;
  int d_ = 0;
  Mat basis_;
  Vec center_;
};

}  // namespace bisons
