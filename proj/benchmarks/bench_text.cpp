#include <benchmark/benchmark.h>

#include <filesystem>

#include "phishkd/corpus.hpp"
#include "phishkd/html.hpp"
#include "phishkd/mime.hpp"
#include "phishkd/pipeline.hpp"
#include "phishkd/porter.hpp"

using namespace phishkd;

namespace {

const std::filesystem::path kFixtures = PHISHKD_FIXTURES;

const std::vector<RawEmail>& phish_corpus() {
  static const auto emails =
      load_corpus(kFixtures / "corpus" / "phish.mbox", CorpusFormat::mbox, Label::phish).emails;
  return emails;
}

void BM_Stem(benchmark::State& state) {
  const char* words[] = {"caresses", "ponies",     "suspended",  "verification", "generalizations",
                         "account",  "conditional", "relational", "hopefulness",  "login"};
  for (auto _ : state) {
    for (const char* w : words) benchmark::DoNotOptimize(stem(w));
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_Stem);

void BM_ParseEmail(benchmark::State& state) {
  const auto& emails = phish_corpus();
  std::size_t bytes = 0;
  for (const auto& e : emails) bytes += e.bytes.size();
  for (auto _ : state) {
    for (const auto& e : emails) benchmark::DoNotOptimize(parse_email(e));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_ParseEmail);

void BM_ProcessEmail(benchmark::State& state) {
  const auto& emails = phish_corpus();
  const TextResources resources;
  for (auto _ : state) {
    for (const auto& e : emails) benchmark::DoNotOptimize(process_email(e, resources));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(emails.size()));
}
BENCHMARK(BM_ProcessEmail);

}  // namespace
