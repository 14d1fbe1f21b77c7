#include <benchmark/benchmark.h>

#include "bisons/adversary.hpp"
#include "bisons/barrier_solver.hpp"
#include "bisons/bisons.hpp"
#include "bisons/comparators.hpp"
#include "bisons/qbisons.hpp"

namespace {

using namespace bisons;

// Steady-state cost of one round (two warm-started Newton solves).
void BM_BisonsRound(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const long long T = 1'000'000;
  const std::vector<ReturnsVec> rs = adversary_sequence({"iid-dirichlet", d, 4096, 1, 0.5});
  BisonsRunner run(default_params(d, T));
  std::size_t i = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(run.step(rs[i++ % rs.size()]).loss);
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_BisonsRound)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_QBisonsRound(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const long long T = 1'000'000;
  const QBisonsParams p = q_default_params(d, T);
  const std::vector<MeasurementEvent> ev = measurement_sequence({"random-measurement", d, 4096, 1, 0.5});
  std::mt19937_64 gen(7);
  std::vector<HermitianMatrix> ls;
  for (const MeasurementEvent& e : ev) ls.push_back(reduce_measurement(e, &gen));
  QBisonsRunner run(p);
  std::size_t i = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(run.step(ls[i++ % ls.size()]).loss);
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_QBisonsRound)->Arg(2)->Arg(3)->Arg(4);

// Cold solve of an accumulated objective with 100 surrogate terms.
void BM_SimplexSolveCold(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const std::vector<ReturnsVec> rs = adversary_sequence({"iid-dirichlet", d, 100, 2, 0.5});
  QuadraticObjective obj(d, 50.0);
  const Portfolio u = Portfolio::uniform(d);
  for (const ReturnsVec& r : rs) {
    const SurrogateQuad s = build_surrogate(u, r, 0.1);
    obj.add_surrogate(s.anchor_grad, s.anchor_value, s.anchor_grad.dot(u.weights()), 0.1);
  }
  for (auto _ : st) {
    benchmark::DoNotOptimize(minimize_simplex(obj, u, 1e-12).objective_value);
  }
}
BENCHMARK(BM_SimplexSolveCold)->Arg(2)->Arg(8)->Arg(32);

void BM_BestCrp(benchmark::State& st) {
  const std::vector<ReturnsVec> rs =
      adversary_sequence({"iid-dirichlet", 4, static_cast<long long>(st.range(0)), 3, 0.5});
  for (auto _ : st) {
    benchmark::DoNotOptimize(best_crp(rs).loss);
  }
}
BENCHMARK(BM_BestCrp)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
