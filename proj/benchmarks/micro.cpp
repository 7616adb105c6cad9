#include <benchmark/benchmark.h>

#include <random>

#include "lakelet/classify.hpp"
#include "lakelet/corpus.hpp"
#include "lakelet/features.hpp"
#include "lakelet/glob.hpp"
#include "lakelet/kmeans.hpp"
#include "lakelet/security.hpp"

namespace {

using namespace lakelet;

FeatureMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows) {
    for (auto& v : r) v = g(rng);
  }
  return FeatureMatrix::from_rows(rows);
}

void BM_Distance(benchmark::State& state) {
  const auto m = random_matrix(2, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(euclidean_distance(m.row(0), m.row(1)));
}
BENCHMARK(BM_Distance)->Arg(8)->Arg(64)->Arg(512);

void BM_KMeans(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 16, 2);
  KMeansOptions opts;
  opts.k = 8;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(m, opts).inertia);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto corpus = gen_corpus(1000, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_format(corpus.records[i].payload));
    i = (i + 1) % corpus.records.size();
  }
}
BENCHMARK(BM_Classify);

void BM_GlobMatch(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(glob_match("store/**/lab-*.json", "store/2024/03/ward-b/lab-1881.json"));
  }
}
BENCHMARK(BM_GlobMatch);

void BM_TicketValidate(benchmark::State& state) {
  const auto secret = Secret::from_hex(std::string(64, 'a'));
  const auto t = issue_ticket("alice", {"analyst", "ops"}, 0, 1'000'000, secret);
  for (auto _ : state) benchmark::DoNotOptimize(validate_ticket(t, 10, secret));
}
BENCHMARK(BM_TicketValidate);

}  // namespace

BENCHMARK_MAIN();
