#include <benchmark/benchmark.h>

#include "phishkd/classify.hpp"
#include "phishkd/mining.hpp"
#include "phishkd/random.hpp"

using namespace phishkd;

namespace {

// Noisy rows where feature 0 carries most of the signal.
Dataset synthetic(std::size_t rows, std::uint64_t seed) {
  auto ds = Dataset::canonical();
  Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    Row row;
    const bool phish = rng.below(2) == 1;
    for (std::size_t j = 0; j < kFeatureCount; ++j) row.values.push_back(static_cast<double>(rng.below(20)));
    row.values[0] += phish ? 8.0 : 0.0;
    row.label = phish ? Label::phish : Label::ham;
    ds.add(row);
  }
  return ds;
}

void BM_InfoGainNumeric(benchmark::State& state) {
  const auto ds = synthetic(static_cast<std::size_t>(state.range(0)), 3);
  std::vector<double> column;
  std::vector<Label> labels;
  for (const auto& r : ds.rows) {
    column.push_back(r.values[0]);
    labels.push_back(r.label);
  }
  for (auto _ : state) benchmark::DoNotOptimize(info_gain(column, labels, FeatureKind::numeric));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_InfoGainNumeric)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_TrainTree(benchmark::State& state) {
  const auto ds = synthetic(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(train_tree(ds, {}));
}
BENCHMARK(BM_TrainTree)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TrainForest(benchmark::State& state) {
  const auto ds = synthetic(10000, 7);
  ModelParams p;
  p.trees = 30;
  p.jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(ds, p));
}
BENCHMARK(BM_TrainForest)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
