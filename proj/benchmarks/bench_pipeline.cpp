#include <benchmark/benchmark.h>

#include "fatiguekit/estimation.hpp"
#include "fatiguekit/pipeline.hpp"
#include "fatiguekit/synth.hpp"

using namespace fatiguekit;

namespace {

void BM_GenerateSessions(benchmark::State& state) {
  SyntheticSubjectSpec spec;
  spec.true_k = 1.02;
  spec.true_capacity = 45.1;
  spec.f_mvc = 0.243;
  spec.noise_sigma = 0.03;
  spec.rng_seed = 1;
  const auto schedule = ProtocolSchedule::standard();
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_sessions(spec, schedule));
  }
}
BENCHMARK(BM_GenerateSessions);

void BM_FitSubject(benchmark::State& state) {
  CohortSpec spec;
  spec.n = 1;
  const auto cohort = generate_cohort(spec);
  FitOptions options;
  options.external_load = spec.external_load;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_subject(cohort[0].record, options));
  }
}
BENCHMARK(BM_FitSubject);

void BM_GenerateCohort(benchmark::State& state) {
  CohortSpec spec;
  spec.n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_cohort(spec));
  }
}
BENCHMARK(BM_GenerateCohort)->Arg(40)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_FullCohortFit(benchmark::State& state) {
  RunConfig config;
  config.cohort_size = 40;
  const auto dataset = simulate_dataset(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_fit(dataset.subjects, config));
  }
}
BENCHMARK(BM_FullCohortFit)->Unit(benchmark::kMicrosecond);

void BM_CohortStats(benchmark::State& state) {
  RunConfig config;
  config.cohort_size = 40;
  const auto dataset = simulate_dataset(config);
  const auto report = run_fit(dataset.subjects, config);
  const auto table = build_cohort_table(report.rows, dataset.subjects);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_stats(table, config));
  }
}
BENCHMARK(BM_CohortStats)->Unit(benchmark::kMicrosecond);

}  // namespace
