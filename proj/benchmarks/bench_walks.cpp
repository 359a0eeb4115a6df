#include <benchmark/benchmark.h>

#include "graphsent/alias.hpp"
#include "graphsent/rng.hpp"
#include "graphsent/walks.hpp"

namespace {

// Random weighted digraph with out-degree ~deg on n nodes.
graphsent::WordGraph random_graph(int n, int deg, std::uint64_t seed) {
  graphsent::Rng rng(seed);
  graphsent::WordGraph g(static_cast<std::size_t>(n), true);
  for (int u = 0; u < n; ++u) {
    for (int k = 0; k < deg; ++k) {
      int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      if (v == u) v = (v + 1) % n;
      g.add_edge(u, v, 1.0 + static_cast<double>(rng.next_below(4)));
    }
  }
  g.freeze();
  return g;
}

void BM_alias_sample(benchmark::State& state) {
  graphsent::Rng rng(5);
  std::vector<double> weights(static_cast<std::size_t>(state.range(0)));
  for (double& w : weights) w = rng.next_double() + 0.01;
  const graphsent::AliasTable table(weights);
  for (auto _ : state) benchmark::DoNotOptimize(table.sample(rng));
}
BENCHMARK(BM_alias_sample)->Arg(16)->Arg(256)->Arg(4096);

void BM_transition_tables(benchmark::State& state) {
  const auto g = random_graph(static_cast<int>(state.range(0)), 12, 9);
  for (auto _ : state) {
    graphsent::TransitionTables tables(g, 0.25, 0.25);
    benchmark::DoNotOptimize(tables);
  }
}
BENCHMARK(BM_transition_tables)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_generate_walks(benchmark::State& state) {
  const auto g = random_graph(static_cast<int>(state.range(0)), 12, 9);
  graphsent::WalkParams params;
  params.walks_per_node = 10;
  params.walk_length = 40;
  for (auto _ : state) {
    auto corpus = graphsent::generate_walks(g, params);
    benchmark::DoNotOptimize(corpus);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}
BENCHMARK(BM_generate_walks)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
