#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "bisons/geometry.hpp"
#include "bisons/hermitian.hpp"
#include "bisons_acceptance/acceptance.hpp"

namespace bisons::acceptance {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::mt19937_64 test_stream(std::string_view label, std::uint64_t index = 0);

/// Complex Gaussian matrix, Hermitian part.
HermitianMatrix random_hermitian(std::mt19937_64& g, int d);
/// U diag(eigs) U^* with Haar-like U from a QR factorization.
HermitianMatrix random_with_spectrum(std::mt19937_64& g, const Vec& eigs);
/// Eigenvalues log-uniform in [lo, hi].
Vec log_uniform_spectrum(std::mt19937_64& g, int d, double lo, double hi);

template <typename T>
std::string str(const T& v) {
  std::ostringstream o;
  o.precision(4);
  o << v;
  return o.str();
}

CriterionResult criterion_1();
CriterionResult criterion_2(MonitorTally& tally);
CriterionResult criterion_3(MonitorTally& tally);
CriterionResult criterion_4();
CriterionResult criterion_5(MonitorTally& tally);
CriterionResult criterion_6(MonitorTally& tally);
CriterionResult criterion_8();
CriterionResult criterion_9();
CriterionResult criterion_10();
CriterionResult criterion_11();

}  // namespace bisons::acceptance
