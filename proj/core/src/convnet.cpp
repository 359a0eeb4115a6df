#include "graphsent/convnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace graphsent {

CnnMode cnn_mode_from_string(const std::string& s) {
  if (s == "rand") return CnnMode::Rand;
  if (s == "static") return CnnMode::Static;
  if (s == "non-static") return CnnMode::NonStatic;
  if (s == "multichannel") return CnnMode::MultiChannel;
  throw ConfigError("unknown CNN mode '" + s +
                    "' (expected rand|static|non-static|multichannel)");
}

std::string to_string(CnnMode mode) {
  switch (mode) {
    case CnnMode::Rand: return "rand";
    case CnnMode::Static: return "static";
    case CnnMode::NonStatic: return "non-static";
    case CnnMode::MultiChannel: return "multichannel";
  }
  return "?";
}

void CnnHyperparams::validate() const {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (dims < 1) throw ConfigError("embedding dims must be >= 1");
  if (filter_widths.empty()) throw ConfigError("at least one filter width required");
  for (int w : filter_widths) {
    if (w < 1) throw ConfigError("filter widths must be >= 1");
    if (w > max_len)
      throw FilterTooWideError("filter width " + std::to_string(w) +
                               " exceeds max_len " + std::to_string(max_len));
  }
  if (filters_per_width < 1) throw ConfigError("filters_per_width must be >= 1");
  if (dropout_p < 0.0 || dropout_p >= 1.0) throw ConfigError("dropout_p must be in [0, 1)");
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
  if (n_classes < 2) throw ConfigError("n_classes must be >= 2");
}

DocMatrix embed_document(const TokenSequence& tokens, const Vocabulary& vocab,
                         const EmbeddingMatrix& emb, int max_len) {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  const int d = static_cast<int>(emb.dims());
  DocMatrix m;
  m.max_len = max_len;
  m.dims = d;
  m.true_length = static_cast<int>(std::min<std::size_t>(tokens.tokens.size(),
                                                          static_cast<std::size_t>(max_len)));
  m.rows.assign(static_cast<std::size_t>(max_len) * static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < m.true_length; ++i) {
    const auto id = vocab.id(tokens.tokens[static_cast<std::size_t>(i)]);
    if (!id) continue;  // out-of-vocabulary: row stays zero
    if (static_cast<std::size_t>(*id) >= emb.rows())
      throw DimensionMismatchError("vocabulary id exceeds embedding rows");
    const auto row = emb.center(*id);
    std::copy(row.begin(), row.end(),
              m.rows.begin() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d));
  }
  return m;
}

Document encode_document(const TokenSequence& tokens, const Vocabulary& vocab, int max_len,
                         int label) {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  Document doc;
  doc.doc_id = tokens.doc_id;
  doc.label = label;
  doc.padded_len = max_len;
  doc.true_length = static_cast<int>(std::min<std::size_t>(tokens.tokens.size(),
                                                           static_cast<std::size_t>(max_len)));
  doc.ids.reserve(static_cast<std::size_t>(doc.true_length));
  for (int i = 0; i < doc.true_length; ++i) {
    const auto id = vocab.id(tokens.tokens[static_cast<std::size_t>(i)]);
    doc.ids.push_back(id ? *id : -1);
  }
  return doc;
}

std::vector<double> convolve(const DocMatrix& doc, std::span<const double> filter,
                             double bias, int width, double (*activation)(double)) {
  if (width < 1) throw ConfigError("filter width must be >= 1");
  if (width > doc.max_len)
    throw FilterTooWideError("filter width " + std::to_string(width) +
                             " exceeds document length " + std::to_string(doc.max_len));
  if (filter.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(doc.dims))
    throw DimensionMismatchError("filter size does not match width x dims");

  const int n_pos = doc.max_len - width + 1;
  std::vector<double> map(static_cast<std::size_t>(n_pos));
  for (int i = 0; i < n_pos; ++i) {
    double z = bias;
    for (int r = 0; r < width; ++r)
      for (int m = 0; m < doc.dims; ++m)
        z += filter[static_cast<std::size_t>(r * doc.dims + m)] * doc.at(i + r, m);
    map[static_cast<std::size_t>(i)] = activation(z);
  }
  return map;
}

double max_over_time(std::span<const double> feature_map) {
  return feature_map[max_over_time_index(feature_map)];
}

std::size_t max_over_time_index(std::span<const double> feature_map) {
  if (feature_map.empty()) throw EmptyFeatureMapError("feature map is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < feature_map.size(); ++i)
    if (feature_map[i] > feature_map[best]) best = i;  // ties keep the first
  return best;
}

CnnModel::CnnModel(CnnHyperparams hp, const EmbeddingMatrix& emb,
                   std::uint64_t vocab_fingerprint, std::uint64_t seed)
    : hp_(std::move(hp)), vocab_size_(emb.rows()), vocab_fingerprint_(vocab_fingerprint) {
  hp_.validate();
  if (static_cast<int>(emb.dims()) != hp_.dims)
    throw DimensionMismatchError("embedding dims differ from hyperparams");
  if (vocab_size_ == 0) throw EmptyGraphError("embedding matrix has no rows");

  t_.emb0 = emb.center_data();
  Rng rng(derive_seed(seed, "cnn-init"));
  if (hp_.mode == CnnMode::Rand) {
    for (double& v : t_.emb0) v = rng.next_double(-0.25, 0.25);
  }
  if (hp_.mode == CnnMode::MultiChannel) t_.emb1 = emb.center_data();

  const int d = hp_.dims;
  for (int w : hp_.filter_widths) {
    const double bound = std::sqrt(6.0 / (w * d + 1.0));
    std::vector<double> bank(static_cast<std::size_t>(hp_.filters_per_width) *
                             static_cast<std::size_t>(w * d));
    for (double& v : bank) v = rng.next_double(-bound, bound);
    t_.filters.push_back(std::move(bank));
    t_.filter_bias.emplace_back(static_cast<std::size_t>(hp_.filters_per_width), 0.0);
  }

  const int pooled = hp_.pooled_size();
  const double b1 = std::sqrt(6.0 / (pooled + hp_.hidden_dim));
  t_.hidden_w.resize(static_cast<std::size_t>(hp_.hidden_dim) *
                     static_cast<std::size_t>(pooled));
  for (double& v : t_.hidden_w) v = rng.next_double(-b1, b1);
  t_.hidden_b.assign(static_cast<std::size_t>(hp_.hidden_dim), 0.0);

  const double b2 = std::sqrt(6.0 / (hp_.hidden_dim + hp_.n_classes));
  t_.out_w.resize(static_cast<std::size_t>(hp_.n_classes) *
                  static_cast<std::size_t>(hp_.hidden_dim));
  for (double& v : t_.out_w) v = rng.next_double(-b2, b2);
  t_.out_b.assign(static_cast<std::size_t>(hp_.n_classes), 0.0);
}

std::span<const double> CnnModel::embedding_row(int channel, int id) const {
  const auto& table = channel == 0 ? t_.emb0 : t_.emb1;
  return {table.data() + static_cast<std::size_t>(id) * static_cast<std::size_t>(hp_.dims),
          static_cast<std::size_t>(hp_.dims)};
}

struct CnnModel::ForwardCache {
  std::vector<double> pooled;   // post-tanh maxima, pre-dropout
  std::vector<int> argmax;      // winning window position per pooled slot
  std::vector<double> mask;     // dropout scale per slot: 0 or 1/(1-p); 1 outside training
  std::vector<double> dropped;  // pooled * mask
  std::vector<double> hidden;   // post-tanh
  std::vector<double> probs;
};

void CnnModel::forward_cached(const Document& doc, bool training, Rng* dropout_rng,
                              ForwardCache& cache) const {
  const int d = hp_.dims;
  const int length = doc.padded_len;
  if (length < 1) throw DimensionMismatchError("document has no positions");
  if (static_cast<int>(doc.ids.size()) > length)
    throw DimensionMismatchError("document ids exceed its padded length");
  for (int id : doc.ids) {
    if (id >= static_cast<int>(vocab_size_))
      throw DimensionMismatchError("document id exceeds model vocabulary");
  }

  const int n_channels = hp_.mode == CnnMode::MultiChannel ? 2 : 1;
  const int pooled_size = hp_.pooled_size();
  cache.pooled.assign(static_cast<std::size_t>(pooled_size), 0.0);
  cache.argmax.assign(static_cast<std::size_t>(pooled_size), 0);

  int slot_base = 0;
  for (std::size_t b = 0; b < hp_.filter_widths.size(); ++b) {
    const int width = hp_.filter_widths[b];
    if (width > length)
      throw FilterTooWideError("document shorter than filter width " + std::to_string(width));
    const int n_pos = length - width + 1;
    const auto& bank = t_.filters[b];
    const auto& bias = t_.filter_bias[b];

    for (int k = 0; k < hp_.filters_per_width; ++k) {
      const double* w = bank.data() + static_cast<std::size_t>(k) *
                                          static_cast<std::size_t>(width * d);
      double best = 0.0;
      int best_pos = 0;
      for (int i = 0; i < n_pos; ++i) {
        double z = bias[static_cast<std::size_t>(k)];
        for (int ch = 0; ch < n_channels; ++ch) {
          for (int r = 0; r < width; ++r) {
            const int pos = i + r;
            if (pos >= static_cast<int>(doc.ids.size())) continue;  // padding row
            const int id = doc.ids[static_cast<std::size_t>(pos)];
            if (id < 0) continue;  // out-of-vocabulary row is zero
            const auto row = embedding_row(ch, id);
            const double* wr = w + static_cast<std::size_t>(r * d);
            for (int m = 0; m < d; ++m) z += wr[m] * row[static_cast<std::size_t>(m)];
          }
        }
        const double c = std::tanh(z);
        if (i == 0 || c > best) {
          best = c;
          best_pos = i;
        }
      }
      cache.pooled[static_cast<std::size_t>(slot_base + k)] = best;
      cache.argmax[static_cast<std::size_t>(slot_base + k)] = best_pos;
    }
    slot_base += hp_.filters_per_width;
  }

  cache.mask.assign(static_cast<std::size_t>(pooled_size), 1.0);
  if (training && hp_.dropout_p > 0.0 && dropout_rng) {
    const double keep_scale = 1.0 / (1.0 - hp_.dropout_p);
    for (double& m : cache.mask)
      m = dropout_rng->next_double() < hp_.dropout_p ? 0.0 : keep_scale;
  }
  cache.dropped.resize(static_cast<std::size_t>(pooled_size));
  for (int j = 0; j < pooled_size; ++j)
    cache.dropped[static_cast<std::size_t>(j)] =
        cache.pooled[static_cast<std::size_t>(j)] * cache.mask[static_cast<std::size_t>(j)];

  cache.hidden.assign(static_cast<std::size_t>(hp_.hidden_dim), 0.0);
  for (int h = 0; h < hp_.hidden_dim; ++h) {
    double z = t_.hidden_b[static_cast<std::size_t>(h)];
    const double* wrow = t_.hidden_w.data() + static_cast<std::size_t>(h) *
                                                  static_cast<std::size_t>(pooled_size);
    for (int j = 0; j < pooled_size; ++j) z += wrow[j] * cache.dropped[static_cast<std::size_t>(j)];
    cache.hidden[static_cast<std::size_t>(h)] = std::tanh(z);
  }

  cache.probs.assign(static_cast<std::size_t>(hp_.n_classes), 0.0);
  double max_logit = -1e300;
  for (int c = 0; c < hp_.n_classes; ++c) {
    double z = t_.out_b[static_cast<std::size_t>(c)];
    const double* wrow = t_.out_w.data() + static_cast<std::size_t>(c) *
                                               static_cast<std::size_t>(hp_.hidden_dim);
    for (int h = 0; h < hp_.hidden_dim; ++h) z += wrow[h] * cache.hidden[static_cast<std::size_t>(h)];
    cache.probs[static_cast<std::size_t>(c)] = z;
    max_logit = std::max(max_logit, z);
  }
  double total = 0.0;
  for (double& p : cache.probs) {
    p = std::exp(p - max_logit);
    total += p;
  }
  for (double& p : cache.probs) p /= total;
}

std::vector<double> CnnModel::forward(const Document& doc, bool training,
                                      Rng* dropout_rng) const {
  ForwardCache cache;
  forward_cached(doc, training, dropout_rng, cache);
  return cache.probs;
}

std::pair<int, std::vector<double>> CnnModel::predict(const Document& doc) const {
  std::vector<double> probs = forward(doc);
  int best = 0;
  for (int c = 1; c < static_cast<int>(probs.size()); ++c)
    if (probs[static_cast<std::size_t>(c)] > probs[static_cast<std::size_t>(best)]) best = c;
  return {best, std::move(probs)};
}

std::vector<CnnModel::ParamGroup> CnnModel::parameter_groups() {
  const bool emb0_trainable = hp_.mode == CnnMode::Rand || hp_.mode == CnnMode::NonStatic;
  std::vector<ParamGroup> groups;
  groups.push_back({"emb0", &t_.emb0, emb0_trainable});
  if (hp_.mode == CnnMode::MultiChannel) groups.push_back({"emb1", &t_.emb1, true});
  for (std::size_t b = 0; b < hp_.filter_widths.size(); ++b) {
    const std::string w = std::to_string(hp_.filter_widths[b]);
    groups.push_back({"filters_w" + w, &t_.filters[b], true});
    groups.push_back({"bias_w" + w, &t_.filter_bias[b], true});
  }
  groups.push_back({"hidden_w", &t_.hidden_w, true});
  groups.push_back({"hidden_b", &t_.hidden_b, true});
  groups.push_back({"out_w", &t_.out_w, true});
  groups.push_back({"out_b", &t_.out_b, true});
  return groups;
}

std::vector<std::pair<std::string, const std::vector<double>*>> CnnModel::parameter_views()
    const {
  auto groups = const_cast<CnnModel*>(this)->parameter_groups();
  std::vector<std::pair<std::string, const std::vector<double>*>> views;
  views.reserve(groups.size());
  for (const auto& g : groups) views.emplace_back(g.name, g.values);
  return views;
}

double CnnModel::loss_and_grads(std::span<const Document> batch, Gradients& grads,
                                Rng* dropout_rng) const {
  if (batch.empty()) throw EmptyDatasetError("loss_and_grads: empty batch");
  for (const Document& doc : batch) {
    if (doc.label < 0 || doc.label >= hp_.n_classes)
      throw LabelOutOfRangeError("label " + std::to_string(doc.label) +
                                 " outside [0, " + std::to_string(hp_.n_classes) + ")");
  }

  auto groups = const_cast<CnnModel*>(this)->parameter_groups();
  grads.by_group.resize(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    grads.by_group[g].assign(groups[g].values->size(), 0.0);

  // Group indices in the fixed layout.
  const bool multichannel = hp_.mode == CnnMode::MultiChannel;
  const std::size_t g_emb0 = 0;
  const std::size_t g_emb1 = multichannel ? 1 : 0;
  const std::size_t g_banks = multichannel ? 2 : 1;
  const std::size_t n_banks = hp_.filter_widths.size();
  const std::size_t g_hidden_w = g_banks + 2 * n_banks;
  const std::size_t g_hidden_b = g_hidden_w + 1;
  const std::size_t g_out_w = g_hidden_b + 1;
  const std::size_t g_out_b = g_out_w + 1;

  const int d = hp_.dims;
  const int pooled_size = hp_.pooled_size();
  const int n_channels = multichannel ? 2 : 1;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const bool emb0_trainable = hp_.mode == CnnMode::Rand || hp_.mode == CnnMode::NonStatic;

  double total_loss = 0.0;
  ForwardCache cache;
  std::vector<double> dhidden(static_cast<std::size_t>(hp_.hidden_dim));
  std::vector<double> dpooled(static_cast<std::size_t>(pooled_size));

  for (const Document& doc : batch) {
    forward_cached(doc, true, dropout_rng, cache);
    const double p_true = cache.probs[static_cast<std::size_t>(doc.label)];
    total_loss += -std::log(std::max(p_true, 1e-300));

    // softmax + cross-entropy
    std::vector<double> dlogits = cache.probs;
    dlogits[static_cast<std::size_t>(doc.label)] -= 1.0;
    for (double& v : dlogits) v *= inv_batch;

    for (int c = 0; c < hp_.n_classes; ++c) {
      const double dl = dlogits[static_cast<std::size_t>(c)];
      double* gw = grads.by_group[g_out_w].data() +
                   static_cast<std::size_t>(c) * static_cast<std::size_t>(hp_.hidden_dim);
      for (int h = 0; h < hp_.hidden_dim; ++h) gw[h] += dl * cache.hidden[static_cast<std::size_t>(h)];
      grads.by_group[g_out_b][static_cast<std::size_t>(c)] += dl;
    }

    for (int h = 0; h < hp_.hidden_dim; ++h) {
      double s = 0.0;
      for (int c = 0; c < hp_.n_classes; ++c)
        s += dlogits[static_cast<std::size_t>(c)] *
             t_.out_w[static_cast<std::size_t>(c) * static_cast<std::size_t>(hp_.hidden_dim) +
                      static_cast<std::size_t>(h)];
      const double hh = cache.hidden[static_cast<std::size_t>(h)];
      dhidden[static_cast<std::size_t>(h)] = s * (1.0 - hh * hh);  // tanh'
    }

    for (int h = 0; h < hp_.hidden_dim; ++h) {
      const double dh = dhidden[static_cast<std::size_t>(h)];
      double* gw = grads.by_group[g_hidden_w].data() +
                   static_cast<std::size_t>(h) * static_cast<std::size_t>(pooled_size);
      for (int j = 0; j < pooled_size; ++j) gw[j] += dh * cache.dropped[static_cast<std::size_t>(j)];
      grads.by_group[g_hidden_b][static_cast<std::size_t>(h)] += dh;
    }

    for (int j = 0; j < pooled_size; ++j) {
      double s = 0.0;
      for (int h = 0; h < hp_.hidden_dim; ++h)
        s += dhidden[static_cast<std::size_t>(h)] *
             t_.hidden_w[static_cast<std::size_t>(h) * static_cast<std::size_t>(pooled_size) +
                         static_cast<std::size_t>(j)];
      dpooled[static_cast<std::size_t>(j)] = s * cache.mask[static_cast<std::size_t>(j)];
    }

    // Through max pooling: the winning window position takes the whole gradient.
    int slot = 0;
    for (std::size_t b = 0; b < n_banks; ++b) {
      const int width = hp_.filter_widths[b];
      const auto& bank = t_.filters[b];
      for (int k = 0; k < hp_.filters_per_width; ++k, ++slot) {
        const double c = cache.pooled[static_cast<std::size_t>(slot)];
        const double dz = dpooled[static_cast<std::size_t>(slot)] * (1.0 - c * c);
        if (dz == 0.0) continue;
        grads.by_group[g_banks + 2 * b + 1][static_cast<std::size_t>(k)] += dz;

        const int i0 = cache.argmax[static_cast<std::size_t>(slot)];
        const double* w = bank.data() + static_cast<std::size_t>(k) *
                                            static_cast<std::size_t>(width * d);
        double* gw = grads.by_group[g_banks + 2 * b].data() +
                     static_cast<std::size_t>(k) * static_cast<std::size_t>(width * d);
        for (int r = 0; r < width; ++r) {
          const int pos = i0 + r;
          if (pos >= static_cast<int>(doc.ids.size())) continue;
          const int id = doc.ids[static_cast<std::size_t>(pos)];
          if (id < 0) continue;
          for (int ch = 0; ch < n_channels; ++ch) {
            const auto row = embedding_row(ch, id);
            for (int m = 0; m < d; ++m)
              gw[r * d + m] += dz * row[static_cast<std::size_t>(m)];
            const bool ch_trainable = ch == 0 ? emb0_trainable : true;
            if (ch_trainable) {
              double* gemb = grads.by_group[ch == 0 ? g_emb0 : g_emb1].data() +
                             static_cast<std::size_t>(id) * static_cast<std::size_t>(d);
              for (int m = 0; m < d; ++m) gemb[m] += dz * w[r * d + m];
            }
          }
        }
      }
    }
  }
  return total_loss * inv_batch;
}

TrainHistory CnnModel::train(std::span<const Document> train_set,
                             std::span<const Document> valid_set, const TrainOptions& opts) {
  if (train_set.empty()) throw EmptyDatasetError("train: empty training set");
  if (opts.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (opts.epochs < 0) throw ConfigError("epochs must be >= 0");

  auto groups = parameter_groups();
  std::vector<std::vector<double>> adam_m(groups.size()), adam_v(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    adam_m[g].assign(groups[g].values->size(), 0.0);
    adam_v[g].assign(groups[g].values->size(), 0.0);
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::int64_t step = 0;

  TrainHistory history;
  Tensors best;
  double best_acc = -1.0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<Document> batch;
  Gradients grads;

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(derive_seed(opts.seed, "shuffle"),
                             static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng.next_below(i));
      std::swap(order[i - 1], order[j]);
    }
    Rng dropout_rng(mix_seed(derive_seed(opts.seed, "dropout"),
                             static_cast<std::uint64_t>(epoch)));

    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(opts.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);

      loss_sum += loss_and_grads(batch, grads, &dropout_rng);
      ++n_batches;
      ++step;

      const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t g = 0; g < groups.size(); ++g) {
        if (!groups[g].trainable) continue;
        auto& theta = *groups[g].values;
        const auto& grad = grads.by_group[g];
        for (std::size_t i = 0; i < theta.size(); ++i) {
          adam_m[g][i] = kBeta1 * adam_m[g][i] + (1.0 - kBeta1) * grad[i];
          adam_v[g][i] = kBeta2 * adam_v[g][i] + (1.0 - kBeta2) * grad[i] * grad[i];
          theta[i] -= opts.learning_rate * (adam_m[g][i] / corr1) /
                      (std::sqrt(adam_v[g][i] / corr2) + kEps);
        }
      }
    }

    history.train_loss.push_back(loss_sum / static_cast<double>(n_batches));
    const double acc = valid_set.empty() ? 0.0 : accuracy(valid_set);
    history.valid_accuracy.push_back(acc);
    if (!valid_set.empty() && acc > best_acc) {
      best_acc = acc;
      best = t_;
      history.best_epoch = epoch;
    }
  }

  if (!valid_set.empty() && history.best_epoch >= 0) {
    t_ = std::move(best);
  } else if (opts.epochs > 0) {
    history.best_epoch = opts.epochs - 1;  // final weights
  }
  return history;
}

double CnnModel::accuracy(std::span<const Document> docs) const {
  if (docs.empty()) return 0.0;
  std::size_t correct = 0;
  for (const Document& doc : docs)
    if (predict(doc).first == doc.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(docs.size());
}

namespace {

void write_values(std::ostream& os, const std::vector<double>& values, int per_line) {
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    os << buf;
    os << (((i + 1) % static_cast<std::size_t>(per_line) == 0 || i + 1 == values.size())
               ? '\n'
               : ' ');
  }
}

std::vector<double> read_values(std::istream& is, std::size_t count, const std::string& what) {
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(is >> values[i])) throw ParseError("model file: truncated tensor " + what);
  }
  return values;
}

}  // namespace

void save_model(const CnnModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  const CnnHyperparams& hp = model.hp_;
  os << "GRAPHSENT-CNN 1\n";
  os << "mode " << to_string(hp.mode) << '\n';
  os << "max_len " << hp.max_len << '\n';
  os << "dims " << hp.dims << '\n';
  os << "filter_widths";
  for (int w : hp.filter_widths) os << ' ' << w;
  os << '\n';
  os << "filters_per_width " << hp.filters_per_width << '\n';
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", hp.dropout_p);
    os << "dropout_p " << buf << '\n';
  }
  os << "hidden_dim " << hp.hidden_dim << '\n';
  os << "n_classes " << hp.n_classes << '\n';
  os << "vocab_size " << model.vocab_size_ << '\n';
  os << "vocab_fingerprint " << model.vocab_fingerprint_ << '\n';

  auto dump = [&os](const std::string& name, const std::vector<double>& v, int per_line) {
    os << "tensor " << name << ' ' << v.size() << '\n';
    write_values(os, v, per_line);
  };
  dump("emb0", model.t_.emb0, hp.dims);
  if (hp.mode == CnnMode::MultiChannel) dump("emb1", model.t_.emb1, hp.dims);
  for (std::size_t b = 0; b < hp.filter_widths.size(); ++b) {
    const std::string w = std::to_string(hp.filter_widths[b]);
    dump("filters_w" + w, model.t_.filters[b], hp.filter_widths[b] * hp.dims);
    dump("bias_w" + w, model.t_.filter_bias[b], hp.filters_per_width);
  }
  dump("hidden_w", model.t_.hidden_w, hp.pooled_size());
  dump("hidden_b", model.t_.hidden_b, hp.hidden_dim);
  dump("out_w", model.t_.out_w, hp.hidden_dim);
  dump("out_b", model.t_.out_b, hp.n_classes);
  if (!os) throw Error("write failure on '" + path + "'");
}

CnnModel load_model(const std::string& path, const Vocabulary* expected_vocab) {
  std::ifstream is(path);
  if (!is) throw FileNotFoundError("cannot open model file '" + path + "'");
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "GRAPHSENT-CNN" || version != 1)
    throw ParseError("not a graphsent model file: '" + path + "'");

  CnnModel model;
  CnnHyperparams& hp = model.hp_;
  hp.filter_widths.clear();

  std::string key;
  while (is >> key) {
    if (key == "mode") {
      std::string v;
      is >> v;
      hp.mode = cnn_mode_from_string(v);
    } else if (key == "max_len") {
      is >> hp.max_len;
    } else if (key == "dims") {
      is >> hp.dims;
    } else if (key == "filter_widths") {
      std::string rest;
      std::getline(is, rest);
      std::istringstream ws(rest);
      int w;
      while (ws >> w) hp.filter_widths.push_back(w);
    } else if (key == "filters_per_width") {
      is >> hp.filters_per_width;
    } else if (key == "dropout_p") {
      is >> hp.dropout_p;
    } else if (key == "hidden_dim") {
      is >> hp.hidden_dim;
    } else if (key == "n_classes") {
      is >> hp.n_classes;
    } else if (key == "vocab_size") {
      is >> model.vocab_size_;
    } else if (key == "vocab_fingerprint") {
      is >> model.vocab_fingerprint_;
    } else if (key == "tensor") {
      std::string name;
      std::size_t count;
      is >> name >> count;
      std::vector<double> values = read_values(is, count, name);
      if (name == "emb0") {
        model.t_.emb0 = std::move(values);
      } else if (name == "emb1") {
        model.t_.emb1 = std::move(values);
      } else if (name.starts_with("filters_w")) {
        model.t_.filters.push_back(std::move(values));
      } else if (name.starts_with("bias_w")) {
        model.t_.filter_bias.push_back(std::move(values));
      } else if (name == "hidden_w") {
        model.t_.hidden_w = std::move(values);
      } else if (name == "hidden_b") {
        model.t_.hidden_b = std::move(values);
      } else if (name == "out_w") {
        model.t_.out_w = std::move(values);
      } else if (name == "out_b") {
        model.t_.out_b = std::move(values);
      } else {
        throw ParseError("model file: unknown tensor '" + name + "'");
      }
    } else {
      throw ParseError("model file: unknown key '" + key + "'");
    }
  }

  hp.validate();
  const auto vd = static_cast<std::size_t>(hp.dims) * model.vocab_size_;
  if (model.t_.emb0.size() != vd)
    throw ParseError("model file: emb0 size mismatch");
  if (hp.mode == CnnMode::MultiChannel && model.t_.emb1.size() != vd)
    throw ParseError("model file: emb1 size mismatch");
  if (model.t_.filters.size() != hp.filter_widths.size() ||
      model.t_.filter_bias.size() != hp.filter_widths.size())
    throw ParseError("model file: filter bank count mismatch");
  if (expected_vocab) {
    if (expected_vocab->fingerprint() != model.vocab_fingerprint_ ||
        expected_vocab->size() != model.vocab_size_)
      throw VocabMismatchError("model was trained against a different vocabulary");
  }
  return model;
}

}  // namespace graphsent
