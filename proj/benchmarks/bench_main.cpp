// Microbenchmarks for the hot paths of a trajectory.

#include <benchmark/benchmark.h>

#include "qkrspb/hilbert.hpp"
#include "qkrspb/metrics.hpp"
#include "qkrspb/qkr_model.hpp"
#include "qkrspb/rdm.hpp"

using namespace qkrspb;

namespace {

ModelParams params(ModelKind kind, int d_E) {
  ModelParams p;
  p.model = kind;
  p.d_E = d_E;
  p.lambda = kind == ModelKind::Qubit ? 0.15 : 0.1;
  return p;
}

void BM_FloquetStep(benchmark::State& st, ModelKind kind) {
  const auto p = params(kind, static_cast<int>(st.range(0)));
  const auto model = build_model(p);
  auto psi = default_initial_state(p, 1);
  for (auto _ : st) {
    psi = floquet_step(model, std::move(psi));
    benchmark::DoNotOptimize(psi);
  }
  st.SetComplexityN(st.range(0));
}

void BM_PartialTrace(benchmark::State& st) {
  const auto p = params(ModelKind::TwoQubit, static_cast<int>(st.range(0)));
  const auto psi = default_initial_state(p, 2);
  for (auto _ : st) benchmark::DoNotOptimize(partial_trace_env(psi));
}

void BM_TraceDistance(benchmark::State& st) {
  const auto p = params(ModelKind::TwoQubit, 256);
  const auto a = partial_trace_env(default_initial_state(p, 3));
  const auto b = partial_trace_env(default_initial_state(p, 4));
  for (auto _ : st) benchmark::DoNotOptimize(trace_distance(a, b));
}

void BM_BuildModel(benchmark::State& st) {
  const auto p = params(ModelKind::Qubit, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_model(p));
}

}  // namespace

BENCHMARK_CAPTURE(BM_FloquetStep, qubit, ModelKind::Qubit)->RangeMultiplier(4)->Range(1 << 8, 1 << 14)->Complexity();
BENCHMARK_CAPTURE(BM_FloquetStep, two_qubit, ModelKind::TwoQubit)->RangeMultiplier(4)->Range(1 << 8, 1 << 14)->Complexity();
BENCHMARK(BM_PartialTrace)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);
BENCHMARK(BM_TraceDistance);
BENCHMARK(BM_BuildModel)->Arg(1 << 10)->Arg(1 << 12);
BENCHMARK_MAIN();
