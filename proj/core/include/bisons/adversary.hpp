#pragma once

// Built-in return and measurement generators. Each is a pure function of
// (seed, t): round t draws from its own stream derived from the root seed.
//
//   iid-dirichlet       r_t ~ Dirichlet(1, ..., 1)
//   single-asset-crash  one asset (picked by the seed) returns nothing for the
//                       first crash_fraction * T rounds while the others share
//                       Dirichlet returns, then it is the only asset that pays
//   alternating-basis   r_t = e_{(t-1) mod d}
//   random-measurement  projector onto a Haar-random unit vector with a
//                       uniform outcome in [0, 1] (quantum runs only)

#include <cstdint>
#include <string>
#include <vector>

#include "bisons/geometry.hpp"
#include "bisons/hermitian.hpp"

namespace bisons {

struct AdversarySpec {
  std::string name;
  int d = 2;
  long long T = 0;
  std::uint64_t seed = 0;
  double crash_fraction = 0.5;
};

bool is_returns_adversary(const std::string& name);
bool is_measurement_adversary(const std::string& name);

/// Dirichlet(1) sample on d coordinates from `gen`.
Vec dirichlet_ones(std::mt19937_64& gen, int d);

/// Index of the crashing asset for single-asset-crash.
int crash_asset(const AdversarySpec& spec);

/// Returns for round t (1-based).
ReturnsVec adversary_returns(const AdversarySpec& spec, long long t);
std::vector<ReturnsVec> adversary_sequence(const AdversarySpec& spec);

MeasurementEvent adversary_measurement(const AdversarySpec& spec, long long t);
std::vector<MeasurementEvent> measurement_sequence(const AdversarySpec& spec);

}  // namespace bisons
