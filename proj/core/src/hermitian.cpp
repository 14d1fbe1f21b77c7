#include "bisons/hermitian.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bisons/error.hpp"
#include "bisons/rng.hpp"

namespace bisons {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPositivePartCutoff = 1e-12;
constexpr double kConditioningFloor = 1e-12;

using EigenSolver = Eigen::SelfAdjointEigenSolver<CMat>;

EigenSolver decompose(const HermitianMatrix& m) {
  EigenSolver es(m.matrix());
  if (es.info() != Eigen::Success) {
    fail(Errc::kNumeric, "Hermitian eigendecomposition failed");
  }
  return es;
}

CMat symmetrize(const CMat& m) { return 0.5 * (m + m.adjoint()); }

// Rebuilds V diag(f(lambda)) V^*.
template <typename F>
HermitianMatrix spectral_map(const HermitianMatrix& m, F&& f) {
  const EigenSolver es = decompose(m);
  Vec mapped(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped[i] = f(es.eigenvalues()[i]);
  const CMat& v = es.eigenvectors();
  return make_hermitian_unchecked(v * mapped.cast<Complex>().asDiagonal() * v.adjoint());
}

void check_dims(const HermitianMatrix& a, const HermitianMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    fail(Errc::kDimensionMismatch, std::string(what) + ": dimension mismatch");
  }
}

// Strict-lower positions (i > j) in column-major order.
template <typename F>
void for_each_lower(int d, F&& f) {
  int k = 0;
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i) f(k++, i, j);
  }
}

}  // namespace

HermitianMatrix make_hermitian_unchecked(CMat m) {
  return HermitianMatrix(symmetrize(m), HermitianMatrix::Trusted{});
}

HermitianMatrix::HermitianMatrix(const CMat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(Errc::kInvalidArgument, "HermitianMatrix: matrix must be square and nonempty");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    fail(Errc::kInvalidArgument, "HermitianMatrix: matrix is not Hermitian");
  }
  m_ = symmetrize(m);
}

HermitianMatrix::HermitianMatrix(const Mat& m) : HermitianMatrix(CMat(m.cast<Complex>())) {}

HermitianMatrix HermitianMatrix::identity(int d) {
  return HermitianMatrix(CMat::Identity(d, d), Trusted{});
}

HermitianMatrix HermitianMatrix::zero(int d) {
  return HermitianMatrix(CMat::Zero(d, d), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(const Vec& diag) {
  return HermitianMatrix(CMat(diag.cast<Complex>().asDiagonal()), Trusted{});
}

Vec HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(m_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(Errc::kNumeric, "eigenvalue computation failed");
  return es.eigenvalues();
}

double HermitianMatrix::min_eigenvalue() const { return eigenvalues().minCoeff(); }
double HermitianMatrix::max_eigenvalue() const { return eigenvalues().maxCoeff(); }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  check_dims(*this, o, "operator+");
  return HermitianMatrix(m_ + o.m_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  check_dims(*this, o, "operator-");
  return HermitianMatrix(m_ - o.m_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(m_ * s, Trusted{});
}

HermitianMatrix HermitianMatrix::congruence(const HermitianMatrix& b) const {
  check_dims(*this, b, "congruence");
  return make_hermitian_unchecked(m_ * b.m_ * m_);
}

QuantumState::QuantumState(HermitianMatrix m) : m_(std::move(m)) {
  if (std::abs(m_.trace() - 1.0) > 1e-10) {
    fail(Errc::kInvalidArgument, "QuantumState: trace must be one");
  }
  if (m_.min_eigenvalue() < -1e-10) {
    fail(Errc::kInvalidArgument, "QuantumState: matrix is not PSD");
  }
}

QuantumState QuantumState::maximally_mixed(int d) {
  return QuantumState(HermitianMatrix::identity(d) * (1.0 / d));
}

MeasurementEvent::MeasurementEvent(HermitianMatrix e, double b)
    : effect(std::move(e)), outcome(b) {
  if (!(b >= 0.0 && b <= 1.0)) {
    fail(Errc::kInvalidArgument, "MeasurementEvent: outcome must lie in [0, 1]");
  }
  const Vec ev = effect.eigenvalues();
  if (ev.minCoeff() < -1e-10 || ev.maxCoeff() > 1.0 + 1e-10) {
    fail(Errc::kInvalidArgument,
         "MeasurementEvent: effect eigenvalues must lie in [0, 1]");
  }
}

double trace_inner(const HermitianMatrix& x, const HermitianMatrix& y) {
  check_dims(x, y, "trace_inner");
  // Tr(XY) = sum_ij X_ij Y_ji
  const Complex v = (x.matrix().transpose().array() * y.matrix().array()).sum();
  const double scale = 1.0 + x.matrix().norm() * y.matrix().norm();
  if (std::abs(v.imag()) > 1e-10 * scale) {
    fail(Errc::kNumeric, "trace_inner: imaginary residual too large");
  }
  return v.real();
}

HermitianMatrix positive_part(const HermitianMatrix& m) {
  return spectral_map(m, [](double l) { return l > kPositivePartCutoff ? l : 0.0; });
}

double a_norm(const HermitianMatrix& w, const HermitianMatrix& a) {
  check_dims(w, a, "a_norm");
  if (a.min_eigenvalue() < -1e-10) fail(Errc::kNumeric, "a_norm: A is not PSD");
  const CMat wa = w.matrix() * a.matrix();
  const double sq = (wa * wa).trace().real();
  if (sq < -1e-12) fail(Errc::kNumeric, "a_norm: negative squared norm");
  return std::sqrt(std::max(sq, 0.0));
}

HermitianMatrix inv_sqrt(const HermitianMatrix& x) {
  if (x.min_eigenvalue() <= kConditioningFloor) {
    fail(Errc::kConditioning, "inv_sqrt: matrix is not safely positive definite");
  }
  return spectral_map(x, [](double l) { return 1.0 / std::sqrt(l); });
}

HermitianMatrix sqrt_psd(const HermitianMatrix& x) {
  return spectral_map(x, [](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
}

HermitianMatrix inverse_pd(const HermitianMatrix& x) {
  if (x.min_eigenvalue() <= kConditioningFloor) {
    fail(Errc::kConditioning, "inverse_pd: matrix is not safely positive definite");
  }
  return spectral_map(x, [](double l) { return 1.0 / l; });
}

double log_det(const HermitianMatrix& x) {
  const Vec ev = x.eigenvalues();
  if (ev.minCoeff() <= 0.0) fail(Errc::kNumeric, "log_det: matrix is not PD");
  return ev.array().log().sum();
}

bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  check_dims(a, b, "loewner_leq");
  return (b - a).min_eigenvalue() >= -tol;
}

Vec vectorize_phi(const HermitianMatrix& m) {
  const int d = m.dim();
  const int off = d * (d - 1) / 2;
  Vec v(d * d);
  for_each_lower(d, [&](int k, int i, int j) {
    v[k] = m(i, j).real();
    v[off + k] = m(j, i).imag();
  });
  for (int i = 0; i < d; ++i) v[2 * off + i] = m(i, i).real();
  return v;
}

HermitianMatrix unvectorize_phi(const Vec& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d) {
    fail(Errc::kDimensionMismatch, "unvectorize_phi: length must be d^2");
  }
  const int off = d * (d - 1) / 2;
  CMat m = CMat::Zero(d, d);
  for_each_lower(d, [&](int k, int i, int j) {
    m(j, i) = Complex(v[k], v[off + k]);
    m(i, j) = Complex(v[k], -v[off + k]);
  });
  for (int i = 0; i < d; ++i) m(i, i) = v[2 * off + i];
  return make_hermitian_unchecked(std::move(m));
}

Vec phi_inner_weights(int d) {
  Vec w = Vec::Ones(d * d);
  w.head(d * (d - 1)).setConstant(2.0);
  return w;
}

Vec phi_functional(const HermitianMatrix& g) {
  return phi_inner_weights(g.dim()).cwiseProduct(vectorize_phi(g));
}

Mat logdet_hessian_phi(const HermitianMatrix& x_inv) {
  const int d = x_inv.dim();
  const int n = d * d;
  const int off = d * (d - 1) / 2;
  const CMat& y = x_inv.matrix();
  // Tr(Y B_a Y B_b) for the sparse basis matrices B_a. Each B_a is a sum of
  // at most two unit entries c E_pq, and Tr(Y E_pq Y E_rs) = Y_sp Y_qr.
  struct Entry {
    int p, q;
    Complex c;
  };
  std::vector<std::array<Entry, 2>> basis(n);
  std::vector<int> count(n, 2);
  for_each_lower(d, [&](int k, int i, int j) {
    basis[k] = {Entry{i, j, 1.0}, Entry{j, i, 1.0}};
    // imaginary coordinate: M(j,i) = i v, M(i,j) = -i v
    basis[off + k] = {Entry{j, i, Complex(0, 1)}, Entry{i, j, Complex(0, -1)}};
  });
  for (int i = 0; i < d; ++i) {
    basis[2 * off + i] = {Entry{i, i, 1.0}, Entry{i, i, 0.0}};
    count[2 * off + i] = 1;
  }
  Mat h(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Complex s = 0.0;
      for (int ea = 0; ea < count[a]; ++ea) {
        const Entry& u = basis[a][ea];
        for (int eb = 0; eb < count[b]; ++eb) {
          const Entry& w = basis[b][eb];
          s += u.c * w.c * y(w.q, u.p) * y(u.q, w.p);
        }
      }
      h(a, b) = h(b, a) = s.real();
    }
  }
  return h;
}

HermitianMatrix reduce_measurement(const MeasurementEvent& ev, std::mt19937_64* rng) {
  const int d = ev.effect.dim();
  const HermitianMatrix id = HermitianMatrix::identity(d);
  const HermitianMatrix complement = id - ev.effect;
  const double b = ev.outcome;
  if (b == 0.0 || b == 1.0) return ev.effect * b + complement * (1.0 - b);
  if (rng == nullptr) {
    fail(Errc::kMissingRandomness,
         "reduce_measurement: fractional outcome requires a random generator");
  }
  const bool y = rng::bernoulli(*rng, b);
  return y ? ev.effect * (1.0 / b) : complement * (1.0 / (1.0 - b));
}

}  // namespace bisons
