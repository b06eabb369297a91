#include <benchmark/benchmark.h>

#include <vector>

#include "qecmag/bayes.h"
#include "qecmag/fisher.h"
#include "qecmag/oracle.h"

using namespace qecmag;

namespace {

const EvolutionTime kUnitTime(1.0);
const MagneticField kField = MagneticField::in_plane(0.3, 0.4);

void CfimTotalDual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<ProbeSpec> probes{ProbeSpec::ancilla_assisted_z(n),
                                      ProbeSpec::ancilla_assisted_x(n)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace_inverse(cfim_total(probes, kField, kUnitTime)));
  }
  state.SetComplexityN(n);
}
BENCHMARK(CfimTotalDual)->RangeMultiplier(2)->Range(8, 512)->Complexity();

void QfimBinomialSum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfim(QfimProbe::Dual, n, kField, kUnitTime));
  }
  state.SetComplexityN(n);
}
BENCHMARK(QfimBinomialSum)->RangeMultiplier(2)->Range(8, 512)->Complexity();

void StatevectorProtocol(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ProbeSpec probe = ProbeSpec::ancilla_assisted_z(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_protocol(probe, kField, kUnitTime));
  }
  state.SetComplexityN(n);
}
BENCHMARK(StatevectorProtocol)->DenseRange(4, 12, 2)->Complexity();

void BayesRepetition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<ProbeSpec> probes{ProbeSpec::ancilla_assisted_z(n),
                                      ProbeSpec::ancilla_assisted_x(n)};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_estimation(probes, kField, kUnitTime, 4000, 1,
                                            EstimationConfig{}, seed++));
  }
}
BENCHMARK(BayesRepetition)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
