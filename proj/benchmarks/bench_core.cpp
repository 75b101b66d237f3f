#include <benchmark/benchmark.h>

#include <numbers>

#include <classd/classd.hpp>

using namespace classd;

namespace {

const Model& default_model() {
  static const Model model(AmplifierParams::defaults());
  return model;
}

void BM_ModelConstruction(benchmark::State& state) {
  const auto p = AmplifierParams::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(Model(p));
}
BENCHMARK(BM_ModelConstruction);

void BM_MatrixExp(benchmark::State& state) {
  const Model& m = default_model();
  for (auto _ : state) benchmark::DoNotOptimize(m.matrix_exp(0.37 * m.params().T));
}
BENCHMARK(BM_MatrixExp);

void BM_QVec(benchmark::State& state) {
  const Model& m = default_model();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(m.q_vec(n, 0.37 * m.params().T));
}
BENCHMARK(BM_QVec)->Arg(1)->Arg(4);

void BM_SteadyState(benchmark::State& state) {
  const Model& m = default_model();
  for (auto _ : state) benchmark::DoNotOptimize(solve_steady_state(m, 0.3));
}
BENCHMARK(BM_SteadyState);

void BM_Monodromy(benchmark::State& state) {
  const Model& m = default_model();
  for (auto _ : state) benchmark::DoNotOptimize(monodromy(m, 0.3));
}
BENCHMARK(BM_Monodromy);

void BM_StabilityThreshold(benchmark::State& state) {
  const auto p = AmplifierParams::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(stability_threshold(p, 0.0, "c1", 1e5, 4.5e5, 1.0));
}
BENCHMARK(BM_StabilityThreshold)->Unit(benchmark::kMillisecond);

void BM_TransferFunctionPoint(benchmark::State& state) {
  const TransferFunction tf(default_model(), 0.0);
  const double w = 2.0 * std::numbers::pi * 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(tf(w));
}
BENCHMARK(BM_TransferFunctionPoint);

void BM_SimulatePeriods(benchmark::State& state) {
  const Model& m = default_model();
  const auto ss = solve_steady_state(m, 0.0);
  const StateVector x0 = state_at_carrier_edge(m, ss);
  const InputSignal in = InputSignal::sine(0.8, 1000.0);
  const long periods = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(m, in, x0, 0.0, periods));
  state.SetItemsProcessed(state.iterations() * periods);
}
BENCHMARK(BM_SimulatePeriods)->Arg(384)->Unit(benchmark::kMillisecond);

void BM_DiscreteMapStep(benchmark::State& state) {
  const Model& m = default_model();
  const auto ss = solve_steady_state(m, 0.0);
  const InputSignal in = InputSignal::sine(0.8, 1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_map_step(m, in, 0, ss.x_at_switch, ss.a));
}
BENCHMARK(BM_DiscreteMapStep);

void BM_HarmonicTable(benchmark::State& state) {
  const Model& m = default_model();
  const auto ss = solve_steady_state(m, 0.0);
  const auto res = simulate(m, InputSignal::sine(0.8, 1000.0), state_at_carrier_edge(m, ss), 0.0, 768);
  const Window w{0.0, 768 * m.params().T};
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_table(res.train, 1000.0, kDefaultHarmonics, w));
}
BENCHMARK(BM_HarmonicTable)->Unit(benchmark::kMicrosecond);

void BM_PredictAudio(benchmark::State& state) {
  const Model& m = default_model();
  const SlowInput in = sine_slow_input(0.8, 1000.0, m.params().T);
  PredictionOptions opt;
  opt.n_harmonics = 4;
  for (auto _ : state) benchmark::DoNotOptimize(predict_audio(m, in, 1e-3, 0.0, opt));
}
BENCHMARK(BM_PredictAudio)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
