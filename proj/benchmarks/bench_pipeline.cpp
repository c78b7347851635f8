// SPDX-License-Identifier: Apache-2.0
// Microbenchmarks for the hot paths: encoding, per-strategy scoring, statistics.

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "bigfive/classifier.hpp"
#include "bigfive/corpus_generator.hpp"
#include "bigfive/encoder.hpp"
#include "bigfive/mock_provider.hpp"
#include "bigfive/rng.hpp"
#include "bigfive/stats.hpp"

namespace {

using namespace bigfive;

const std::vector<LabeledMessage>& corpus() {
  static const auto messages = [] {
    CorpusPlan plan;
    plan.n_scripts = 2;
    plan.seed = 7;
    auto provider = mock_provider(0);
    return generate_corpus(*provider, plan);
  }();
  return messages;
}

const TrainedModelBundle& bundle(TrainingStrategy s) {
  static std::map<TrainingStrategy, TrainedModelBundle> cache;
  auto it = cache.find(s);
  if (it == cache.end()) {
    TrainConfig cfg;
    cfg.strategy = s;
    cfg.epochs = 2;
    it = cache.emplace(s, train(corpus(), HashedNgramEncoder(), cfg)).first;
  }
  return it->second;
}

void BM_Featurize(benchmark::State& state) {
  const HashedNgramEncoder enc;
  const auto& text = corpus().front().text;
  for (auto _ : state) benchmark::DoNotOptimize(enc.featurize(text));
}
BENCHMARK(BM_Featurize);

void BM_Encode(benchmark::State& state) {
  const HashedNgramEncoder enc;
  const auto& text = corpus().front().text;
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode(text));
}
BENCHMARK(BM_Encode);

void BM_Score(benchmark::State& state) {
  const auto& b = bundle(static_cast<TrainingStrategy>(state.range(0)));
  const auto& text = corpus().front().text;
  for (auto _ : state) benchmark::DoNotOptimize(b.score(text));
  state.SetLabel(std::string(to_string(b.strategy())));
}
BENCHMARK(BM_Score)
    ->Arg(static_cast<int>(TrainingStrategy::TOGETHER))
    ->Arg(static_cast<int>(TrainingStrategy::SEPARATE))
    ->Arg(static_cast<int>(TrainingStrategy::ADAPTER));

void BM_ScoreSequentialAdapter(benchmark::State& state) {
  const auto& b = bundle(TrainingStrategy::ADAPTER);
  const auto& text = corpus().front().text;
  for (auto _ : state) benchmark::DoNotOptimize(b.score_sequential(text));
}
BENCHMARK(BM_ScoreSequentialAdapter);

void BM_Pearson(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = x[i] + rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(pearson(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pearson)->RangeMultiplier(10)->Range(10, 100000)->Complexity();

}  // namespace

BENCHMARK_MAIN();
