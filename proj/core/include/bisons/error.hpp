#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bisons {

enum class Errc {
  kInvalidReturns,
  kInfiniteLoss,
  kInvalidArgument,
  kDimensionMismatch,
  kNumeric,
  kConditioning,
  kInteriority,
  kParameter,
  kMissingRandomness,
  kInfeasibleMovement,
  kSolverFailure,
  kParse,
  kIo,
};

std::string_view errc_name(Errc code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace bisons
