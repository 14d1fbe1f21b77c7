#include <Eigen/QR>

#include <cstdio>

#include "bisons/error.hpp"
#include "bisons/rng.hpp"
#include "common.hpp"

namespace bisons::acceptance {

std::mt19937_64 test_stream(std::string_view label, std::uint64_t index) {
  return rng::stream(0x5eedULL, label, index);
}

HermitianMatrix random_hermitian(std::mt19937_64& g, int d) {
  CMat m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = Complex(rng::standard_normal(g), rng::standard_normal(g));
  }
  return make_hermitian_unchecked(m);
}

HermitianMatrix random_with_spectrum(std::mt19937_64& g, const Vec& eigs) {
  const auto d = static_cast<int>(eigs.size());
  CMat m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = Complex(rng::standard_normal(g), rng::standard_normal(g));
  }
  const CMat q = Eigen::HouseholderQR<CMat>(m).householderQ();
  return make_hermitian_unchecked(q * eigs.cast<Complex>().asDiagonal() * q.adjoint());
}

Vec log_uniform_spectrum(std::mt19937_64& g, int d, double lo, double hi) {
  Vec e(d);
  for (int i = 0; i < d; ++i) e[i] = lo * std::pow(hi / lo, rng::uniform01(g));
  return e;
}

namespace {

const char* title_of(int id) {
  switch (id) {
    case 1: return "lower-surrogate lemma";
    case 2: return "BISONS regret bound";
    case 3: return "completed-epoch nonpositivity";
    case 4: return "matrix bias update";
    case 5: return "diagonal equivalence";
    case 6: return "qBISONS regret bound";
    case 7: return "run-invariant monitors";
    case 8: return "target sequence validity";
    case 9: return "regret-stability lower bound";
    case 10: return "calculus checks";
    case 11: return "solver oracle equivalence";
    default: return "unknown";
  }
}

}  // namespace

const CriterionResult& Session::run(int id) {
  if (auto it = done_.find(id); it != done_.end()) return it->second;
  CriterionResult r;
  Stopwatch sw;
  try {
    switch (id) {
      case 1: r = criterion_1(); break;
      case 2: r = criterion_2(tally_); break;
      case 3: r = criterion_3(tally_); break;
      case 4: r = criterion_4(); break;
      case 5: r = criterion_5(tally_); break;
      case 6: r = criterion_6(tally_); break;
      case 7: {
        for (int dep : {2, 3, 5, 6}) run(dep);
        sw = Stopwatch{};
        r.passed = tally_.runs > 0 && tally_.violations == 0;
        r.detail = str(tally_.runs) + " runs, " + str(tally_.rounds) + " monitored rounds, " +
                   str(tally_.violations) + " violations";
        if (!tally_.first_violation.empty()) r.detail += "; first: " + tally_.first_violation;
        break;
      }
      case 8: r = criterion_8(); break;
      case 9: r = criterion_9(); break;
      case 10: r = criterion_10(); break;
      case 11: r = criterion_11(); break;
      default: fail(Errc::kInvalidArgument, "no acceptance criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    r.passed = false;
    r.detail = std::string("error [") + std::string(errc_name(e.code())) + "]: " + e.what();
  }
  r.id = id;
  r.title = title_of(id);
  if (id == 7) r.seconds = sw.seconds();
  else if (r.seconds == 0.0) r.seconds = sw.seconds();
  return done_[id] = r;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "lemmas") return {1, 4, 10, 11};
  if (suite == "bisons") return {2, 3, 7};
  if (suite == "qbisons") return {5, 6, 7};
  if (suite == "lbftrl") return {8, 9};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  fail(Errc::kInvalidArgument,
       "unknown suite '" + suite + "' (expected lemmas, bisons, qbisons, lbftrl or all)");
}

std::string format_result(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
  return std::string(r.passed ? "[PASS]" : "[FAIL]") + " criterion " + std::to_string(r.id) +
         ": " + r.title + " (" + secs + " s) " + r.detail;
}

}  // namespace bisons::acceptance
