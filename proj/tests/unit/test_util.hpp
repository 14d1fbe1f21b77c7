#pragma once

#include <Eigen/QR>

#include <cmath>
#include <random>

#include "bisons/geometry.hpp"
#include "bisons/hermitian.hpp"

namespace bisons::test {

inline std::mt19937_64 gen(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double unif(std::mt19937_64& g) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

inline double normal(std::mt19937_64& g) { return std::normal_distribution<double>()(g); }

/// Interior simplex point from normalized exponentials.
inline Vec simplex_point(std::mt19937_64& g, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = std::exponential_distribution<double>(1.0)(g) + 1e-6;
  return v / v.sum();
}

inline HermitianMatrix random_hermitian(std::mt19937_64& g, int d) {
  CMat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = Complex(normal(g), normal(g));
  }
  return HermitianMatrix(CMat((m + m.adjoint()) * 0.5));
}

inline CMat random_unitary(std::mt19937_64& g, int d) {
  CMat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = Complex(normal(g), normal(g));
  }
  return Eigen::HouseholderQR<CMat>(m).householderQ();
}

/// U diag(eigs) U^* with a random unitary U.
inline HermitianMatrix with_spectrum(std::mt19937_64& g, const Vec& eigs) {
  const CMat u = random_unitary(g, static_cast<int>(eigs.size()));
  CMat m = u * eigs.cast<Complex>().asDiagonal() * u.adjoint();
  m = (m + m.adjoint()) * 0.5;
  return HermitianMatrix(m);
}

/// Random density matrix with eigenvalues bounded below by lo / d.
inline HermitianMatrix random_state(std::mt19937_64& g, int d, double lo = 0.05) {
  Vec e(d);
  for (int i = 0; i < d; ++i) e[i] = lo + unif(g);
  return with_spectrum(g, e / e.sum());
}

}  // namespace bisons::test
