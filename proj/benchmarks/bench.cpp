#include <benchmark/benchmark.h>

#include "rashomon/models.hpp"
#include "rashomon/rng.hpp"
#include "rashomon/shap.hpp"
#include "rashomon/similarity.hpp"
#include "rashomon/synth.hpp"

namespace {

using namespace rashomon;

Dataset bench_data(std::size_t n, std::size_t k) { return make_planted(n, k, 0.1, 7); }

void bm_train(benchmark::State& state, Family family) {
  const Dataset d = bench_data(512, 10);
  ModelSpec spec = sample_spec(family, 11);
  spec.seed = 13;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(spec, d.features, d.labels));
  }
}

void bm_explain_enumerated(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  const Dataset d = bench_data(256, k);
  ModelSpec spec;
  spec.family = Family::lr;
  const TrainedModel m = train(spec, d.features, d.labels);
  const Background bg = make_background(d.features, 16, 3);
  std::vector<std::size_t> rows(8);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const Matrix X = d.features.take_rows(rows);
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain(m, X, bg));
  }
}

void bm_explain_sampled(benchmark::State& state) {
  const Dataset d = bench_data(256, 20);
  ModelSpec spec;
  spec.family = Family::lr;
  const TrainedModel m = train(spec, d.features, d.labels);
  const Background bg = make_background(d.features, 16, 3);
  std::vector<std::size_t> rows(4);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const Matrix X = d.features.take_rows(rows);
  ShapConfig cfg;
  cfg.nsamples = static_cast<std::size_t>(state.range(0));
  cfg.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain(m, X, bg, cfg));
  }
}

void bm_wcossim_group(benchmark::State& state) {
  Rng rng(21);
  std::vector<GlobalImportance> models(10);
  for (auto& g : models) {
    g.per_feature.resize(32);
    for (auto& v : g.per_feature) v = rng.uniform();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(wcossim_group(models));
  }
}

BENCHMARK_CAPTURE(bm_train, lr, Family::lr);
BENCHMARK_CAPTURE(bm_train, dt, Family::dt);
BENCHMARK_CAPTURE(bm_train, gbc, Family::gbc);
BENCHMARK(bm_explain_enumerated)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_explain_sampled)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_wcossim_group);

}  // namespace

BENCHMARK_MAIN();
