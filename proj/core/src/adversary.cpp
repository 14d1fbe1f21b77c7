#include "bisons/adversary.hpp"

#include <cmath>

#include "bisons/error.hpp"
#include "bisons/rng.hpp"

namespace bisons {

bool is_returns_adversary(const std::string& name) {
  return name == "iid-dirichlet" || name == "single-asset-crash" || name == "alternating-basis";
}

bool is_measurement_adversary(const std::string& name) { return name == "random-measurement"; }

Vec dirichlet_ones(std::mt19937_64& gen, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = rng::exponential(gen);
  return v / v.sum();
}

int crash_asset(const AdversarySpec& spec) {
  return static_cast<int>(rng::derive_seed(spec.seed, "adversary.crash-asset") %
                          static_cast<std::uint64_t>(spec.d));
}

ReturnsVec adversary_returns(const AdversarySpec& spec, long long t) {
  require(spec.d >= 2, Errc::kInvalidArgument, "adversary needs d >= 2");
  require(t >= 1, Errc::kInvalidArgument, "rounds are numbered from 1");
  const auto index = static_cast<std::uint64_t>(t);
  if (spec.name == "iid-dirichlet") {
    std::mt19937_64 gen = rng::stream(spec.seed, "adversary.iid-dirichlet", index);
    return normalize_returns(dirichlet_ones(gen, spec.d));
  }
  if (spec.name == "alternating-basis") {
    Vec r = Vec::Zero(spec.d);
    r[(t - 1) % spec.d] = 1.0;
    return normalize_returns(r);
  }
  if (spec.name == "single-asset-crash") {
    require(spec.crash_fraction >= 0.0 && spec.crash_fraction <= 1.0, Errc::kParameter,
            "crash_fraction must lie in [0, 1]");
    const int k = crash_asset(spec);
    const auto crash_end =
        static_cast<long long>(std::floor(spec.crash_fraction * static_cast<double>(spec.T)));
    Vec r = Vec::Zero(spec.d);
    if (t <= crash_end) {
      std::mt19937_64 gen = rng::stream(spec.seed, "adversary.single-asset-crash", index);
      const Vec w = dirichlet_ones(gen, spec.d - 1);
      for (int i = 0, j = 0; i < spec.d; ++i) {
        if (i != k) r[i] = w[j++];
      }
    } else {
      r[k] = 1.0;
    }
    return normalize_returns(r);
  }
  fail(Errc::kInvalidArgument, "unknown returns adversary: " + spec.name);
}

std::vector<ReturnsVec> adversary_sequence(const AdversarySpec& spec) {
  std::vector<ReturnsVec> out;
  out.reserve(static_cast<std::size_t>(spec.T));
  for (long long t = 1; t <= spec.T; ++t) out.push_back(adversary_returns(spec, t));
  return out;
}

MeasurementEvent adversary_measurement(const AdversarySpec& spec, long long t) {
  require(spec.name == "random-measurement", Errc::kInvalidArgument,
          "unknown measurement adversary: " + spec.name);
  require(spec.d >= 1, Errc::kInvalidArgument, "adversary needs d >= 1");
  std::mt19937_64 gen =
      rng::stream(spec.seed, "adversary.random-measurement", static_cast<std::uint64_t>(t));
  Eigen::VectorXcd v(spec.d);
  for (int i = 0; i < spec.d; ++i) {
    const double re = rng::standard_normal(gen);
    const double im = rng::standard_normal(gen);
    v[i] = Complex(re, im);
  }
  v /= v.norm();
  const double b = rng::uniform01(gen);
  return MeasurementEvent(make_hermitian_unchecked(v * v.adjoint()), b);
}

std::vector<MeasurementEvent> measurement_sequence(const AdversarySpec& spec) {
  std::vector<MeasurementEvent> out;
  out.reserve(static_cast<std::size_t>(spec.T));
  for (long long t = 1; t <= spec.T; ++t) out.push_back(adversary_measurement(spec, t));
  return out;
}

}  // namespace bisons
