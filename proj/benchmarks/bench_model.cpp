#include <benchmark/benchmark.h>

#include "fatiguekit/biomech.hpp"
#include "fatiguekit/fatigue_model.hpp"

using namespace fatiguekit;

namespace {

void BM_RemainingCapacityStatic(benchmark::State& state) {
  const FatigueParameters params(1.02, 45.1, CapacityUnit::moment);
  const RelativeLoad f(0.243);
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-6;
    benchmark::DoNotOptimize(remaining_capacity_static(params, f, t));
  }
}
BENCHMARK(BM_RemainingCapacityStatic);

void BM_IntegrateCapacity(benchmark::State& state) {
  const FatigueParameters params(1.02, 45.1, CapacityUnit::moment);
  const auto load = LoadProfile::constant(10.96, CapacityUnit::moment);
  const double t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_capacity(params, load, t_end, 1e-3));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(t_end / 1e-3));
}
BENCHMARK(BM_IntegrateCapacity)->Arg(3)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_IntegrateSampledLoad(benchmark::State& state) {
  const FatigueParameters params(1.5, 100.0, CapacityUnit::force);
  std::vector<double> times, loads;
  for (int i = 0; i <= 30; ++i) {
    times.push_back(0.1 * i);
    loads.push_back(20.0 + 10.0 * (i % 3));
  }
  const auto load = LoadProfile::sampled(times, loads, CapacityUnit::force);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_capacity(params, load, 3.0, 1e-3));
  }
}
BENCHMARK(BM_IntegrateSampledLoad)->Unit(benchmark::kMillisecond);

void BM_MomentLoad(benchmark::State& state) {
  MarkerFrame frame;
  frame.shoulder = {0.0, 0.0, 1.0};
  frame.elbow = {0.17, 0.0, 0.84};
  frame.wrist = {0.42, 0.0, 0.86};
  frame.drill = {0.57, 0.0, 0.87};
  SegmentForces forces;
  forces.upper_arm_weight = {0.0, 0.0, -19.3};
  forces.forearm_weight = {0.0, 0.0, -15.2};
  forces.machine_weight = {0.0, 0.0, -24.5};
  forces.drill_force = {6.3, 0.0, -24.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(moment_load(frame, forces));
  }
}
BENCHMARK(BM_MomentLoad);

void BM_PostureAngles(benchmark::State& state) {
  MarkerFrame frame;
  frame.shoulder = {0.0, 0.0, 1.0};
  frame.elbow = {0.17, 0.0, 0.84};
  frame.wrist = {0.42, 0.0, 0.86};
  frame.drill = {0.57, 0.0, 0.87};
  for (auto _ : state) {
    benchmark::DoNotOptimize(posture_angles(frame));
  }
}
BENCHMARK(BM_PostureAngles);

}  // namespace

BENCHMARK_MAIN();
