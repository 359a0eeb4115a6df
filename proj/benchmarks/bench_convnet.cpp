#include <benchmark/benchmark.h>

#include "graphsent/convnet.hpp"
#include "graphsent/rng.hpp"

namespace {

using namespace graphsent;

struct Setup {
  CnnHyperparams hp;
  EmbeddingMatrix emb;
  std::vector<Document> batch;
};

Setup make_setup(int max_len, int dims, int n_filters) {
  Setup s;
  s.hp.max_len = max_len;
  s.hp.dims = dims;
  s.hp.filter_widths = {3, 4};
  s.hp.filters_per_width = n_filters;
  s.hp.hidden_dim = 150;
  s.hp.dropout_p = 0.25;
  s.hp.n_classes = 2;
  s.hp.mode = CnnMode::Static;

  const std::size_t vocab = 200;
  s.emb = EmbeddingMatrix(vocab, static_cast<std::size_t>(dims));
  Rng rng(13);
  for (double& v : s.emb.center_data()) v = rng.next_double(-0.5, 0.5);

  for (int d = 0; d < 32; ++d) {
    Document doc;
    doc.padded_len = max_len;
    doc.true_length = max_len;
    doc.label = d % 2;
    for (int i = 0; i < max_len; ++i)
      doc.ids.push_back(static_cast<int>(rng.next_below(vocab)));
    s.batch.push_back(std::move(doc));
  }
  return s;
}

void BM_cnn_forward(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 20, 150);
  const CnnModel model(s.hp, s.emb, 0, 21);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(s.batch.front()));
}
BENCHMARK(BM_cnn_forward)->Arg(20)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_cnn_batch_backward(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 20, 150);
  const CnnModel model(s.hp, s.emb, 0, 21);
  CnnModel::Gradients grads;
  Rng rng(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(model.loss_and_grads(s.batch, grads, &rng));
}
BENCHMARK(BM_cnn_batch_backward)->Arg(20)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
