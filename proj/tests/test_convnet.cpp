#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "common/fixtures.hpp"
#include "graphsent/convnet.hpp"

using namespace graphsent;

namespace {

EmbeddingMatrix random_embedding(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  EmbeddingMatrix emb(rows, dims);
  Rng rng(seed);
  for (double& v : emb.center_data()) v = rng.next_double(-0.8, 0.8);
  return emb;
}

Vocabulary numbered_vocab(int n) {
  Vocabulary v;
  for (int i = 0; i < n; ++i) v.add("tok" + std::to_string(i));
  return v;
}

CnnHyperparams small_hp(CnnMode mode, int max_len = 6, int dims = 4) {
  CnnHyperparams hp;
  hp.max_len = max_len;
  hp.dims = dims;
  hp.filter_widths = {2, 3};
  hp.filters_per_width = 3;
  hp.dropout_p = 0.0;
  hp.hidden_dim = 5;
  hp.n_classes = 2;
  hp.mode = mode;
  return hp;
}

Document random_doc(int length, int max_len, std::size_t vocab, int label, Rng& rng,
                    double oov_rate = 0.0) {
  Document doc;
  doc.padded_len = max_len;
  doc.true_length = std::min(length, max_len);
  doc.label = label;
  for (int i = 0; i < doc.true_length; ++i) {
    const bool oov = rng.next_double() < oov_rate;
    doc.ids.push_back(oov ? -1 : static_cast<int>(rng.next_below(vocab)));
  }
  return doc;
}

// Straight-line oracle for the whole forward chain, written against the
// embedding matrix rather than the model internals.
std::vector<double> oracle_forward(const CnnModel& model, const Document& doc) {
  const auto& hp = model.hyperparams();
  const auto& t = model.tensors();
  const int d = hp.dims;
  const int channels = hp.mode == CnnMode::MultiChannel ? 2 : 1;

  auto row_value = [&](int ch, int pos, int m) -> double {
    if (pos >= static_cast<int>(doc.ids.size())) return 0.0;
    const int id = doc.ids[static_cast<std::size_t>(pos)];
    if (id < 0) return 0.0;
    const auto& table = ch == 0 ? t.emb0 : t.emb1;
    return table[static_cast<std::size_t>(id) * static_cast<std::size_t>(d) +
                 static_cast<std::size_t>(m)];
  };

  std::vector<double> pooled;
  for (std::size_t b = 0; b < hp.filter_widths.size(); ++b) {
    const int width = hp.filter_widths[b];
    for (int k = 0; k < hp.filters_per_width; ++k) {
      double best = -1e30;
      for (int i = 0; i + width <= doc.padded_len; ++i) {
        double z = t.filter_bias[b][static_cast<std::size_t>(k)];
        for (int ch = 0; ch < channels; ++ch)
          for (int r = 0; r < width; ++r)
            for (int m = 0; m < d; ++m)
              z += t.filters[b][static_cast<std::size_t>(k) * static_cast<std::size_t>(width * d) +
                               static_cast<std::size_t>(r * d + m)] *
                   row_value(ch, i + r, m);
        best = std::max(best, std::tanh(z));
      }
      pooled.push_back(best);
    }
  }

  std::vector<double> hidden(static_cast<std::size_t>(hp.hidden_dim));
  for (int h = 0; h < hp.hidden_dim; ++h) {
    double z = t.hidden_b[static_cast<std::size_t>(h)];
    for (std::size_t j = 0; j < pooled.size(); ++j)
      z += t.hidden_w[static_cast<std::size_t>(h) * pooled.size() + j] * pooled[j];
    hidden[static_cast<std::size_t>(h)] = std::tanh(z);
  }
  std::vector<double> logits(static_cast<std::size_t>(hp.n_classes));
  for (int c = 0; c < hp.n_classes; ++c) {
    double z = t.out_b[static_cast<std::size_t>(c)];
    for (int h = 0; h < hp.hidden_dim; ++h)
      z += t.out_w[static_cast<std::size_t>(c) * static_cast<std::size_t>(hp.hidden_dim) +
                   static_cast<std::size_t>(h)] *
           hidden[static_cast<std::size_t>(h)];
    logits[static_cast<std::size_t>(c)] = z;
  }
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

}  // namespace

TEST_CASE("embed_document pads, truncates and zeroes OOV rows") {
  const Vocabulary vocab = numbered_vocab(8);
  const auto emb = random_embedding(8, 4, 3);

  SUBCASE("padding rows beyond true_length are zero") {
    TokenSequence ts{{"tok0", "tok1", "tok2"}, "d"};
    const auto m = embed_document(ts, vocab, emb, 5);
    CHECK(m.true_length == 3);
    for (int i = 3; i < 5; ++i)
      for (int j = 0; j < 4; ++j) CHECK(m.at(i, j) == 0.0);
    for (int j = 0; j < 4; ++j) CHECK(m.at(1, j) == emb.center(1)[static_cast<std::size_t>(j)]);
  }
  SUBCASE("out-of-vocabulary rows are zero") {
    TokenSequence ts{{"tok0", "never-seen", "tok2"}, "d"};
    const auto m = embed_document(ts, vocab, emb, 4);
    for (int j = 0; j < 4; ++j) CHECK(m.at(1, j) == 0.0);
  }
  SUBCASE("overflow truncates to the first max_len tokens") {
    TokenSequence ts{{"tok0", "tok1", "tok2", "tok3", "tok4", "tok5", "tok6"}, "d"};
    const auto m = embed_document(ts, vocab, emb, 5);
    CHECK(m.true_length == 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(m.at(i, j) == emb.center(i)[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("convolve matches the hand-evaluated dot product") {
  DocMatrix doc;
  doc.max_len = 2;
  doc.dims = 2;
  doc.true_length = 2;
  doc.rows = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> w{1.0, 0.0, 0.0, 1.0};
  const auto identity = [](double x) { return x; };
  const auto c = convolve(doc, w, 0.0, 2, identity);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == 5.0);  // 1*1 + 0*2 + 0*3 + 1*4
}

TEST_CASE("convolve length law and edge cases") {
  DocMatrix doc;
  doc.max_len = 10;
  doc.dims = 3;
  doc.true_length = 10;
  doc.rows.assign(30, 0.5);
  for (int x = 1; x <= 10; ++x) {
    const std::vector<double> w(static_cast<std::size_t>(3 * x), 0.1);
    CHECK(convolve(doc, w, 0.0, x, std::tanh).size() ==
          static_cast<std::size_t>(10 - x + 1));
  }
  const std::vector<double> zero(6, 0.0);
  for (double c : convolve(doc, zero, 0.0, 2, std::tanh)) CHECK(c == 0.0);

  const std::vector<double> wide(static_cast<std::size_t>(3 * 11), 0.1);
  CHECK_THROWS_AS(convolve(doc, wide, 0.0, 11, std::tanh), FilterTooWideError);
  const std::vector<double> misshaped(5, 0.1);
  CHECK_THROWS_AS(convolve(doc, misshaped, 0.0, 2, std::tanh), DimensionMismatchError);
}

TEST_CASE("max_over_time takes the first maximum") {
  const std::vector<double> m1{0.2, -0.5, 0.9};
  CHECK(max_over_time(m1) == 0.9);
  const std::vector<double> ties{0.3, 0.3};
  CHECK(max_over_time(ties) == 0.3);
  CHECK(max_over_time_index(ties) == 0);  // gradient routes to the first
  const std::vector<double> single{-1.2};
  CHECK(max_over_time(single) == -1.2);
  CHECK_THROWS_AS(max_over_time(std::vector<double>{}), EmptyFeatureMapError);
}

TEST_CASE("forward produces a probability vector") {
  const auto emb = random_embedding(10, 4, 5);
  Rng rng(6);
  for (CnnMode mode : {CnnMode::Rand, CnnMode::Static, CnnMode::NonStatic,
                       CnnMode::MultiChannel}) {
    const CnnModel model(small_hp(mode), emb, 1, 77);
    for (int trial = 0; trial < 10; ++trial) {
      const auto doc = random_doc(3 + static_cast<int>(rng.next_below(4)), 6, 10, 0, rng, 0.2);
      const auto probs = model.forward(doc);
      double total = 0.0;
      for (double p : probs) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        total += p;
      }
      CHECK(std::abs(total - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("zero weights and zero document give the uniform distribution") {
  CnnHyperparams hp = small_hp(CnnMode::Static);
  const EmbeddingMatrix zero_emb(10, 4);
  CnnModel model(hp, zero_emb, 1, 77);
  // Zero out everything the initializer randomized.
  for (auto& group : model.parameter_groups())
    std::fill(group.values->begin(), group.values->end(), 0.0);

  Document doc;
  doc.padded_len = 6;
  doc.true_length = 2;
  doc.ids = {0, 1};
  const auto probs = model.forward(doc);
  REQUIRE(probs.size() == 2);
  CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("forward agrees with the straight-line oracle in every mode") {
  const auto emb = random_embedding(12, 4, 9);
  Rng rng(10);
  for (CnnMode mode : {CnnMode::Rand, CnnMode::Static, CnnMode::NonStatic,
                       CnnMode::MultiChannel}) {
    const CnnModel model(small_hp(mode), emb, 1, 31);
    for (int trial = 0; trial < 8; ++trial) {
      const auto doc = random_doc(2 + static_cast<int>(rng.next_below(5)), 6, 12, 0, rng, 0.15);
      const auto probs = model.forward(doc);
      const auto expect = oracle_forward(model, doc);
      REQUIRE(probs.size() == expect.size());
      for (std::size_t c = 0; c < probs.size(); ++c)
        CHECK(probs[c] == doctest::Approx(expect[c]).epsilon(1e-10));
    }
  }
}

TEST_CASE("predict takes the argmax with ties toward class 0") {
  const auto emb = random_embedding(10, 4, 5);
  const CnnModel model(small_hp(CnnMode::Static), emb, 1, 77);
  Rng rng(11);
  const auto doc = random_doc(4, 6, 10, 1, rng);
  const auto [label, probs] = model.predict(doc);
  CHECK(label == (probs[0] >= probs[1] ? 0 : 1));
  // Symmetric zero model ties exactly; argmax must pick class 0.
  CnnModel zero_model(small_hp(CnnMode::Static), EmbeddingMatrix(10, 4), 1, 77);
  for (auto& group : zero_model.parameter_groups())
    std::fill(group.values->begin(), group.values->end(), 0.0);
  CHECK(zero_model.predict(doc).first == 0);
}

TEST_CASE("cross-entropy closed forms") {
  const auto emb = random_embedding(10, 4, 5);
  CnnModel model(small_hp(CnnMode::Static), emb, 1, 77);
  Rng rng(12);
  Document doc = random_doc(4, 6, 10, 1, rng);

  SUBCASE("uniform output gives ln 2") {
    for (auto& group : model.parameter_groups())
      std::fill(group.values->begin(), group.values->end(), 0.0);
    CnnModel::Gradients grads;
    const std::vector<Document> batch{doc};
    CHECK(model.loss_and_grads(batch, grads) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("a saturated correct logit gives loss ~ 0") {
    for (auto& group : model.parameter_groups())
      std::fill(group.values->begin(), group.values->end(), 0.0);
    // Drive class-1 logit through the bias alone.
    model.tensors().out_b[1] = 60.0;
    CnnModel::Gradients grads;
    const std::vector<Document> batch{doc};
    CHECK(model.loss_and_grads(batch, grads) < 1e-12);
  }
  SUBCASE("label out of range is rejected") {
    doc.label = 2;
    CnnModel::Gradients grads;
    const std::vector<Document> batch{doc};
    CHECK_THROWS_AS(model.loss_and_grads(batch, grads), LabelOutOfRangeError);
    const std::vector<Document> empty;
    CHECK_THROWS_AS(model.loss_and_grads(empty, grads), EmptyDatasetError);
  }
}

TEST_CASE("gradients match central finite differences in all four modes") {
  // 4-document batch, d=4, widths (2,3), 3 filters per width.
  const auto emb = random_embedding(9, 4, 21);
  Rng rng(22);
  std::vector<Document> batch;
  for (int i = 0; i < 4; ++i)
    batch.push_back(random_doc(3 + static_cast<int>(rng.next_below(4)), 6, 9, i % 2, rng, 0.1));

  const double h = 1e-4;
  for (CnnMode mode : {CnnMode::Rand, CnnMode::Static, CnnMode::NonStatic,
                       CnnMode::MultiChannel}) {
    CAPTURE(to_string(mode));
    CnnModel model(small_hp(mode), emb, 1, 55);
    CnnModel::Gradients grads;
    model.loss_and_grads(batch, grads);

    auto groups = model.parameter_groups();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      CAPTURE(groups[g].name);
      auto& theta = *groups[g].values;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + h;
        CnnModel::Gradients up_grads;
        const double up = model.loss_and_grads(batch, up_grads);
        theta[i] = saved - h;
        const double down = model.loss_and_grads(batch, up_grads);
        theta[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = groups[g].trainable ? grads.by_group[g][i] : 0.0;
        if (!groups[g].trainable) {
          // Frozen groups report zero gradient by contract.
          CHECK(grads.by_group[g][i] == 0.0);
          continue;
        }
        const double scale = std::max({1e-3, std::abs(numeric), std::abs(analytic)});
        CHECK(std::abs(analytic - numeric) / scale < 1e-4);
      }
    }
  }
}

TEST_CASE("training contracts: determinism, null step, frozen embeddings") {
  const auto emb = random_embedding(16, 4, 31);
  Rng rng(32);
  std::vector<Document> train_set, valid_set;
  for (int i = 0; i < 24; ++i)
    train_set.push_back(random_doc(4 + static_cast<int>(rng.next_below(3)), 6, 16, i % 2, rng));
  for (int i = 0; i < 8; ++i)
    valid_set.push_back(random_doc(4, 6, 16, i % 2, rng));

  CnnModel::TrainOptions opts;
  opts.epochs = 3;
  opts.batch_size = 8;
  opts.seed = 17;

  SUBCASE("same seed twice gives bitwise-identical history and weights") {
    CnnModel a(small_hp(CnnMode::NonStatic), emb, 1, 90);
    CnnModel b(small_hp(CnnMode::NonStatic), emb, 1, 90);
    const auto ha = a.train(train_set, valid_set, opts);
    const auto hb = b.train(train_set, valid_set, opts);
    CHECK(ha.train_loss == hb.train_loss);
    CHECK(ha.valid_accuracy == hb.valid_accuracy);
    CHECK(a.tensors().emb0 == b.tensors().emb0);
    CHECK(a.tensors().out_w == b.tensors().out_w);
  }
  SUBCASE("learning rate zero leaves parameters unchanged") {
    CnnModel model(small_hp(CnnMode::NonStatic), emb, 1, 90);
    const auto before = model.tensors();
    CnnModel::TrainOptions frozen = opts;
    frozen.learning_rate = 0.0;
    frozen.epochs = 1;
    model.train(train_set, {}, frozen);
    CHECK(model.tensors().emb0 == before.emb0);
    CHECK(model.tensors().filters == before.filters);
    CHECK(model.tensors().hidden_w == before.hidden_w);
    CHECK(model.tensors().out_w == before.out_w);
  }
  SUBCASE("static mode never touches the embedding table") {
    CnnModel model(small_hp(CnnMode::Static), emb, 1, 90);
    const auto before = model.tensors().emb0;
    model.train(train_set, valid_set, opts);
    CHECK(model.tensors().emb0 == before);  // bitwise
    CHECK(model.tensors().emb0 == emb.center_data());
  }
  SUBCASE("multichannel trains channel 1 and freezes channel 0") {
    CnnModel model(small_hp(CnnMode::MultiChannel), emb, 1, 90);
    model.train(train_set, valid_set, opts);
    CHECK(model.tensors().emb0 == emb.center_data());
    CHECK(model.tensors().emb1 != emb.center_data());
  }
  SUBCASE("empty training set is rejected") {
    CnnModel model(small_hp(CnnMode::Static), emb, 1, 90);
    CHECK_THROWS_AS(model.train({}, valid_set, opts), EmptyDatasetError);
  }
}

TEST_CASE("a planted linear signal is learned quickly") {
  // Token 0 marks class 1, token 1 marks class 0; fillers draw from ids >= 2
  // so the signal stays clean.
  const auto emb = random_embedding(20, 4, 41);
  Rng rng(42);
  std::vector<Document> train_set;
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    Document doc;
    doc.padded_len = 6;
    doc.true_length = 5;
    doc.label = label;
    for (int k = 0; k < 5; ++k) doc.ids.push_back(2 + static_cast<int>(rng.next_below(18)));
    doc.ids[static_cast<std::size_t>(rng.next_below(doc.ids.size()))] = label == 1 ? 0 : 1;
    train_set.push_back(std::move(doc));
  }
  CnnHyperparams hp = small_hp(CnnMode::Static);
  hp.filters_per_width = 8;
  hp.hidden_dim = 16;
  CnnModel model(hp, emb, 1, 43);
  CnnModel::TrainOptions opts;
  opts.epochs = 10;
  opts.batch_size = 10;
  opts.learning_rate = 5e-3;
  opts.seed = 44;
  model.train(train_set, {}, opts);
  CHECK(model.accuracy(train_set) >= 0.95);
  for (const auto& [name, values] : model.parameter_views())
    for (double v : *values) CHECK(std::isfinite(v));
}

TEST_CASE("extra zero padding never changes the forward output") {
  const auto emb = random_embedding(10, 4, 51);
  Rng rng(52);
  const CnnModel model(small_hp(CnnMode::Static, 8), emb, 1, 53);
  for (int trial = 0; trial < 10; ++trial) {
    // Keep true_length short enough that an all-zero window already exists.
    Document doc = random_doc(4, 8, 10, 0, rng);
    Document padded = doc;
    padded.padded_len = 13;
    const auto a = model.forward(doc);
    const auto b = model.forward(padded);
    for (std::size_t c = 0; c < a.size(); ++c)
      CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-12));
  }
}

TEST_CASE("dropout applies only during training") {
  const auto emb = random_embedding(10, 4, 61);
  CnnHyperparams hp = small_hp(CnnMode::Static);
  hp.dropout_p = 0.5;
  const CnnModel model(hp, emb, 1, 62);
  Rng rng(63);
  const auto doc = random_doc(4, 6, 10, 0, rng);

  const auto a = model.forward(doc);
  const auto b = model.forward(doc);
  CHECK(a == b);  // inference is deterministic

  Rng d1(7), d2(8);
  const auto t1 = model.forward(doc, true, &d1);
  const auto t2 = model.forward(doc, true, &d2);
  CHECK(t1 != t2);  // different masks move the output
}

TEST_CASE("model persistence round-trips and rejects vocab mismatch") {
  const Vocabulary vocab = numbered_vocab(10);
  const auto emb = random_embedding(10, 4, 71);
  Rng rng(72);
  for (CnnMode mode : {CnnMode::Static, CnnMode::MultiChannel}) {
    const CnnModel model(small_hp(mode), emb, vocab.fingerprint(), 73);
    const std::string path = fixtures::write_temp_file("model.txt", "");
    save_model(model, path);
    const CnnModel loaded = load_model(path, &vocab);
    CHECK(loaded.hyperparams().mode == mode);
    CHECK(loaded.tensors().emb0 == model.tensors().emb0);
    CHECK(loaded.tensors().filters == model.tensors().filters);
    CHECK(loaded.tensors().out_b == model.tensors().out_b);

    const auto doc = random_doc(4, 6, 10, 0, rng);
    CHECK(model.forward(doc) == loaded.forward(doc));

    // Re-saving the loaded model reproduces the file byte for byte.
    const std::string path2 = fixtures::write_temp_file("model2.txt", "");
    save_model(loaded, path2);
    std::ifstream f1(path), f2(path2);
    const std::string c1((std::istreambuf_iterator<char>(f1)), {});
    const std::string c2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(c1 == c2);

    Vocabulary other = numbered_vocab(10);
    other.add("one-more");
    CHECK_THROWS_AS(load_model(path, &other), VocabMismatchError);
  }
  CHECK_THROWS_AS(load_model("/nonexistent/model.txt"), FileNotFoundError);
}
