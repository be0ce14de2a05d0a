// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "rapp/conflict.hpp"
#include "rapp/planner.hpp"
#include "rapp/retrieval.hpp"

using namespace rapp;

namespace {

SubsetProblem subset_problem(int n) {
  testkit::Rng rng(42);
  return testkit::random_subset_problem(rng, n, 0.2);
}

struct GraphInput {
  testkit::RandomWorld world;
  std::vector<Pipeline> candidates;
  DeploymentState pre;
};

GraphInput graph_input(int n) {
  testkit::Rng rng(7);
  GraphInput g{testkit::random_world(rng, 12, n), {}, {}};
  for (IntentId id = 1; id <= n; ++id) {
    auto p = testkit::random_pipeline(rng, g.world.registry, id, 4);
    (id % 4 == 0 ? g.pre.active : g.candidates).push_back(std::move(p));
  }
  return g;
}

std::vector<DocChunk> chunks(std::size_t n) {
  HashedTrigramEmbedder e;
  std::vector<DocChunk> out;
  for (std::size_t i = 0; i < n; ++i) {
    DocChunk c;
    c.doc_id = "d" + std::to_string(i);
    c.text = "chunk " + std::to_string(i * 7919) + " scheduling beam energy";
    c.vector = e.embed(c.text);
    out.push_back(std::move(c));
  }
  return out;
}

void BM_SubsetSerial(benchmark::State& st) {
  auto p = subset_problem(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::best_valid_subset(p, SubsetPriority::SizeFirst));
}

void BM_SubsetParallel(benchmark::State& st) {
  auto p = subset_problem(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(best_valid_subset(p, SubsetPriority::SizeFirst));
}

void BM_GraphSerial(benchmark::State& st) {
  auto g = graph_input(static_cast<int>(st.range(0)));
  ConflictContext ctx{g.world.registry, g.world.intents, g.world.matrix};
  for (auto _ : st) benchmark::DoNotOptimize(reference::build_conflict_graph(g.candidates, g.pre, ctx));
}

void BM_GraphParallel(benchmark::State& st) {
  auto g = graph_input(static_cast<int>(st.range(0)));
  ConflictContext ctx{g.world.registry, g.world.intents, g.world.matrix};
  for (auto _ : st) benchmark::DoNotOptimize(build_conflict_graph(g.candidates, g.pre, ctx));
}

void BM_ScoreSerial(benchmark::State& st) {
  auto cs = chunks(static_cast<std::size_t>(st.range(0)));
  auto q = HashedTrigramEmbedder().embed("energy saving during off-peak hours");
  for (auto _ : st) benchmark::DoNotOptimize(reference::score_chunks(cs, q));
}

void BM_ScoreParallel(benchmark::State& st) {
  auto cs = chunks(static_cast<std::size_t>(st.range(0)));
  auto q = HashedTrigramEmbedder().embed("energy saving during off-peak hours");
  for (auto _ : st) benchmark::DoNotOptimize(score_chunks(cs, q));
}

}  // namespace

BENCHMARK(BM_SubsetSerial)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetParallel)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GraphSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GraphParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSerial)->Arg(1000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreParallel)->Arg(1000)->Arg(20000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
