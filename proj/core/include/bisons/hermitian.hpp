#pragma once

// Dense Hermitian matrix calculus for the quantum log-loss problem.
//
// The real vectorization phi lists, for each strictly lower position (i, j),
// i > j, in column-major order, first all Re M(i,j), then all Im M(j,i)
// (the imaginary part of the mirrored upper entry), and finally the d real
// diagonal entries. For d = 2, [[a, x+iy], [x-iy, b]] maps to (x, y, a, b).
//
// With this ordering the trace inner product is a diagonal quadratic form,
//   <X, Y> = phi(X)^T W phi(Y),  W = diag(2, ..., 2, 1, ..., 1),
// with weight 2 on the d(d-1) off-diagonal coordinates. Hessians of functions
// of X expressed in phi coordinates therefore carry this weighting; see
// logdet_hessian_phi().

#include <Eigen/Dense>

#include <complex>
#include <random>

#include "bisons/geometry.hpp"

namespace bisons {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  /// Validates conjugate symmetry (1e-12) and symmetrizes the round-off away.
  explicit HermitianMatrix(const CMat& m);
  /// Real symmetric input.
  explicit HermitianMatrix(const Mat& m);

  static HermitianMatrix identity(int d);
  static HermitianMatrix zero(int d);
  static HermitianMatrix diagonal(const Vec& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.diagonal().real().sum(); }

  /// Ascending eigenvalues.
  Vec eigenvalues() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  /// A * B * A for Hermitian A (this) and B; the result is Hermitian.
  HermitianMatrix congruence(const HermitianMatrix& b) const;

 private:
  struct Trusted {};
  HermitianMatrix(CMat m, Trusted) : m_(std::move(m)) {}
  friend HermitianMatrix make_hermitian_unchecked(CMat m);
  CMat m_;
};

/// Symmetrizes (M + M^*)/2 without validation. For products that are
/// Hermitian in exact arithmetic.
HermitianMatrix make_hermitian_unchecked(CMat m);

/// Trace-one positive semidefinite matrix (min eigenvalue >= -1e-10).
class QuantumState {
 public:
  explicit QuantumState(HermitianMatrix m);
  static QuantumState maximally_mixed(int d);

  int dim() const { return m_.dim(); }
  const HermitianMatrix& matrix() const { return m_; }

 private:
  HermitianMatrix m_;
};

/// A two-outcome measurement effect with eigenvalues in [0, 1] and the
/// observed outcome b in [0, 1].
struct MeasurementEvent {
  HermitianMatrix effect;
  double outcome = 0.0;

  MeasurementEvent(HermitianMatrix e, double b);
};

/// Tr(XY), with the imaginary residual checked (<= 1e-10) and dropped.
double trace_inner(const HermitianMatrix& x, const HermitianMatrix& y);

/// Zeroes negative eigenvalues; eigenvalues in (-1e-12, 0) count as zero.
HermitianMatrix positive_part(const HermitianMatrix& m);

/// sqrt(Tr(W A W A)) for PSD A.
double a_norm(const HermitianMatrix& w, const HermitianMatrix& a);

/// X^{-1/2}; throws Errc::kConditioning if min eigenvalue <= 1e-12.
HermitianMatrix inv_sqrt(const HermitianMatrix& x);
/// X^{1/2} for PSD X (negative round-off eigenvalues clipped).
HermitianMatrix sqrt_psd(const HermitianMatrix& x);
/// X^{-1}; throws Errc::kConditioning if min eigenvalue <= 1e-12.
HermitianMatrix inverse_pd(const HermitianMatrix& x);
/// log det X for PD X.
double log_det(const HermitianMatrix& x);

inline constexpr double kLoewnerTol = 1e-9;

/// A <= B in Loewner order: min eigenvalue of B - A >= -tol.
bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b,
                 double tol = kLoewnerTol);

/// Real vectorization (see file comment). Length d^2.
Vec vectorize_phi(const HermitianMatrix& m);
HermitianMatrix unvectorize_phi(const Vec& v, int d);
/// The diagonal weights W with <X, Y> = phi(X)^T W phi(Y).
Vec phi_inner_weights(int d);
/// phi coordinates of the linear functional X -> <X, G>: W * phi(G).
Vec phi_functional(const HermitianMatrix& g);
/// Index of the first diagonal coordinate in phi (= d(d-1)).
inline int phi_diag_offset(int d) { return d * (d - 1); }

/// Hessian of -log det at PD X in phi coordinates: entry (a, b) equals
/// Tr(X^{-1} B_a X^{-1} B_b) where B_a = unvectorize_phi(e_a). Hence
/// phi(D)^T H phi(D) = Tr(D X^{-1} D X^{-1}).
Mat logdet_hessian_phi(const HermitianMatrix& x_inv);

/// Loss matrix produced from a measurement. For b in {0, 1} the result is
/// b E + (1-b)(I - E); otherwise y ~ Bernoulli(b) is drawn from `rng` and the
/// result is (y/b) E + ((1-y)/(1-b)) (I - E). Throws Errc::kMissingRandomness
/// when b is fractional and no generator is supplied.
HermitianMatrix reduce_measurement(const MeasurementEvent& ev,
                                   std::mt19937_64* rng = nullptr);

}  // namespace bisons
