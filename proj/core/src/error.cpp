#include "bisons/error.hpp"

namespace bisons {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidReturns: return "invalid-returns";
    case Errc::kInfiniteLoss: return "infinite-loss";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kDimensionMismatch: return "dimension-mismatch";
    case Errc::kNumeric: return "numeric";
    case Errc::kConditioning: return "conditioning";
    case Errc::kInteriority: return "interiority";
    case Errc::kParameter: return "parameter";
    case Errc::kMissingRandomness: return "missing-randomness";
    case Errc::kInfeasibleMovement: return "infeasible-movement";
    case Errc::kSolverFailure: return "solver-failure";
    case Errc::kParse: return "parse";
    case Errc::kIo: return "io";
  }
  return "unknown";
}

}  // namespace bisons
