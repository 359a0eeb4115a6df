#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "graphsent/rng.hpp"
#include "graphsent/textgraph.hpp"

namespace {

std::vector<graphsent::TokenSequence> synthetic_docs(int n_docs, int vocab, int len,
                                                     std::uint64_t seed) {
  graphsent::Rng rng(seed);
  std::vector<graphsent::TokenSequence> docs;
  docs.reserve(static_cast<std::size_t>(n_docs));
  for (int d = 0; d < n_docs; ++d) {
    graphsent::TokenSequence ts;
    ts.doc_id = "d" + std::to_string(d);
    for (int i = 0; i < len; ++i)
      ts.tokens.push_back("tok" + std::to_string(rng.next_below(static_cast<std::uint64_t>(vocab))));
    docs.push_back(std::move(ts));
  }
  return docs;
}

void BM_tokenize(benchmark::State& state) {
  const std::string text =
      "Not a good movie, but the acting was fine and the ending wasn't bad at all!";
  for (auto _ : state) {
    auto tokens = graphsent::tokenize(text);
    benchmark::DoNotOptimize(tokens);
  }
}
BENCHMARK(BM_tokenize);

void BM_corpus_graph(benchmark::State& state) {
  const auto docs = synthetic_docs(static_cast<int>(state.range(0)), 200, 15, 11);
  for (auto _ : state) {
    auto result = graphsent::build_corpus_graph(docs, {3, true, true});
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_corpus_graph)->Arg(200)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
