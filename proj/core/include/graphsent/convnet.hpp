#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "graphsent/errors.hpp"
#include "graphsent/rng.hpp"
#include "graphsent/skipgram.hpp"
#include "graphsent/textgraph.hpp"

namespace graphsent {

/// Word-vector handling during training:
///   Rand         embeddings randomly initialized, fine-tuned
///   Static       given embeddings, frozen
///   NonStatic    given embeddings, fine-tuned
///   MultiChannel two copies of the given embeddings; channel 0 frozen,
///                channel 1 fine-tuned; filters see the sum of both channels
enum class CnnMode { Rand, Static, NonStatic, MultiChannel };

CnnMode cnn_mode_from_string(const std::string& s);
std::string to_string(CnnMode mode);

struct CnnHyperparams {
  int max_len = 64;                     // padded sequence length
  int dims = 20;                        // embedding dimensions
  std::vector<int> filter_widths{3, 4};
  int filters_per_width = 150;
  double dropout_p = 0.25;              // on the pooled vector, training only
  int hidden_dim = 150;
  int n_classes = 2;
  CnnMode mode = CnnMode::Static;

  int pooled_size() const {
    return static_cast<int>(filter_widths.size()) * filters_per_width;
  }
  void validate() const;
};

/// Document as a padded max_len x dims matrix of embedding rows. Rows past
/// true_length and rows of out-of-vocabulary tokens are exactly zero.
struct DocMatrix {
  int max_len = 0;
  int dims = 0;
  int true_length = 0;
  std::vector<double> rows;  // row-major max_len x dims

  double at(int i, int j) const {
    return rows[static_cast<std::size_t>(i) * static_cast<std::size_t>(dims) +
                static_cast<std::size_t>(j)];
  }
};

/// Token ids padded to a fixed length; -1 marks out-of-vocabulary tokens.
/// Padding positions past ids.size() are implicit zero rows. Training needs
/// ids rather than materialized rows so embedding gradients can flow.
struct Document {
  std::vector<int> ids;
  int padded_len = 0;
  int true_length = 0;
  int label = -1;
  std::string doc_id;
};

DocMatrix embed_document(const TokenSequence& tokens, const Vocabulary& vocab,
                         const EmbeddingMatrix& emb, int max_len);
Document encode_document(const TokenSequence& tokens, const Vocabulary& vocab, int max_len,
                         int label = -1);

/// c_i = f(w . rows[i..i+width-1] + b) for each valid window position.
/// Filter layout: width x dims, row-major.
std::vector<double> convolve(const DocMatrix& doc, std::span<const double> filter,
                             double bias, int width, double (*activation)(double));

/// Maximum of the feature map; ties resolve to the first occurrence so
/// gradient routing is unambiguous.
double max_over_time(std::span<const double> feature_map);
std::size_t max_over_time_index(std::span<const double> feature_map);

struct TrainHistory {
  std::vector<double> train_loss;      // mean cross-entropy per epoch
  std::vector<double> valid_accuracy;  // per epoch; 0 when the valid set is empty
  int best_epoch = -1;
};

class CnnModel {
 public:
  /// Initializes filter banks and dense layers from the seed. The embedding
  /// table is copied from emb (shape must match hyperparams); Rand mode keeps
  /// only its shape and draws fresh values.
  CnnModel(CnnHyperparams hp, const EmbeddingMatrix& emb, std::uint64_t vocab_fingerprint,
           std::uint64_t seed);

  const CnnHyperparams& hyperparams() const { return hp_; }
  std::uint64_t vocab_fingerprint() const { return vocab_fingerprint_; }
  std::size_t vocab_size() const { return vocab_size_; }

  /// Class probabilities. Dropout applies only when training is true and an
  /// RNG is supplied. Throws DimensionMismatch on shape disagreement and
  /// FilterTooWide when the document is shorter than a filter.
  std::vector<double> forward(const Document& doc, bool training = false,
                              Rng* dropout_rng = nullptr) const;

  /// argmax label (ties toward the lowest class index) plus probabilities.
  std::pair<int, std::vector<double>> predict(const Document& doc) const;

  // Parameter groups, in a fixed order shared with gradients:
  // emb0, [emb1,] then per width {filters, biases}, hidden_w, hidden_b,
  // out_w, out_b. Frozen groups are still listed (their gradients are zero).
  struct ParamGroup {
    std::string name;
    std::vector<double>* values;
    bool trainable;
  };
  std::vector<ParamGroup> parameter_groups();
  std::vector<std::pair<std::string, const std::vector<double>*>> parameter_views() const;

  struct Gradients {
    std::vector<std::vector<double>> by_group;  // aligned with parameter_groups()
  };

  /// Mean cross-entropy over the batch plus gradients for every group
  /// (frozen groups get zeros). Dropout uses dropout_rng when supplied.
  double loss_and_grads(std::span<const Document> batch, Gradients& grads,
                        Rng* dropout_rng = nullptr) const;

  struct TrainOptions {
    int epochs = 10;
    double learning_rate = 1e-3;  // adaptive moment estimation step size
    int batch_size = 32;
    std::uint64_t seed = 1;
  };

  /// Adam training with per-epoch validation; returns history and leaves the
  /// model at the best-validation snapshot (final weights when the valid set
  /// is empty). Deterministic under a fixed seed.
  TrainHistory train(std::span<const Document> train_set, std::span<const Document> valid_set,
                     const TrainOptions& opts);

  double accuracy(std::span<const Document> docs) const;

  // Raw tensors, used by persistence and tests.
  struct Tensors {
    std::vector<double> emb0, emb1;                 // vocab x dims each
    std::vector<std::vector<double>> filters;       // per width: n_filters x (width*dims)
    std::vector<std::vector<double>> filter_bias;   // per width: n_filters
    std::vector<double> hidden_w, hidden_b;         // hidden x pooled, hidden
    std::vector<double> out_w, out_b;               // classes x hidden, classes
  };
  Tensors& tensors() { return t_; }
  const Tensors& tensors() const { return t_; }

 private:
  friend void save_model(const CnnModel&, const std::string&);
  friend CnnModel load_model(const std::string&, const Vocabulary*);

  CnnModel() = default;  // for the loader

  struct ForwardCache;
  void forward_cached(const Document& doc, bool training, Rng* dropout_rng,
                      ForwardCache& cache) const;
  std::span<const double> embedding_row(int channel, int id) const;

  CnnHyperparams hp_;
  std::size_t vocab_size_ = 0;
  std::uint64_t vocab_fingerprint_ = 0;
  Tensors t_;
};

/// Text container with hyperparams, mode, vocabulary fingerprint and all
/// tensors at full double precision; loading against a different vocabulary
/// throws VocabMismatch.
void save_model(const CnnModel& model, const std::string& path);
CnnModel load_model(const std::string& path, const Vocabulary* expected_vocab = nullptr);

}  // namespace graphsent
