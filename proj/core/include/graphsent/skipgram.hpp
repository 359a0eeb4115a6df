#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "graphsent/errors.hpp"
#include "graphsent/walks.hpp"

namespace graphsent {

/// Two-matrix skip-gram parameters: a center vector f(u) and a context vector
/// f'(u) per node. Center vectors are the exported embedding.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dims)
      : rows_(rows), dims_(dims), center_(rows * dims, 0.0), context_(rows * dims, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t dims() const { return dims_; }

  std::span<double> center(int id) {
    return {center_.data() + static_cast<std::size_t>(id) * dims_, dims_};
  }
  std::span<const double> center(int id) const {
    return {center_.data() + static_cast<std::size_t>(id) * dims_, dims_};
  }
  std::span<double> context(int id) {
    return {context_.data() + static_cast<std::size_t>(id) * dims_, dims_};
  }
  std::span<const double> context(int id) const {
    return {context_.data() + static_cast<std::size_t>(id) * dims_, dims_};
  }

  std::vector<double>& center_data() { return center_; }
  const std::vector<double>& center_data() const { return center_; }
  std::vector<double>& context_data() { return context_; }
  const std::vector<double>& context_data() const { return context_; }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t dims_ = 0;
  std::vector<double> center_;
  std::vector<double> context_;
};

/// All (center, context) index pairs of one walk within the context window:
/// position i pairs with every j != i, |i - j| <= window.
std::vector<std::pair<int, int>> skipgram_pairs(std::span<const int> walk, int context_window);

/// Gradients of the negative-sampling loss with respect to the touched rows.
struct PairGradients {
  std::vector<double> center;                  // d loss / d f(center)
  std::vector<double> context;                 // d loss / d f'(context)
  std::vector<std::vector<double>> negatives;  // d loss / d f'(neg_k)
};

/// loss = -ln s(f(c) . f'(ctx)) - sum_k ln s(-f(c) . f'(neg_k)), computed in
/// log-sum form so saturated scores stay finite. Gradients are optional.
double negative_sampling_loss(const EmbeddingMatrix& emb, int center, int context,
                              std::span<const int> negatives,
                              PairGradients* grads = nullptr);

struct SkipGramParams {
  int dims = 20;
  int epochs = 5;
  double learning_rate = 0.025;  // decays linearly to 1e-4 of itself
  int negatives = 5;             // k_neg
  int context_window = 5;
  double noise_power = 0.75;     // noise distribution is weights^noise_power
  std::uint64_t seed = 1;
  int threads = 1;  // 1 = deterministic; >1 = lock-free asynchronous updates

  void validate() const {
    if (dims < 1) throw ConfigError("embedding dims must be >= 1");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be > 0");
    if (negatives < 1) throw ConfigError("negatives must be >= 1");
    if (context_window < 1) throw ConfigError("context_window must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
  }
};

struct SkipGramStats {
  std::vector<double> epoch_mean_loss;  // one entry per epoch
};

/// SGD over all skip-gram pairs of the walk corpus with k negative samples per
/// pair drawn from noise_weights^noise_power (per-node weights; the pipeline
/// passes weighted graph out-degrees). Single-threaded runs are bitwise
/// reproducible from the seed; threads > 1 trades that for speed with
/// unsynchronized relaxed-atomic updates.
EmbeddingMatrix train_embeddings(const WalkCorpus& walks, std::size_t node_count,
                                 std::span<const double> noise_weights,
                                 const SkipGramParams& params,
                                 SkipGramStats* stats = nullptr);

}  // namespace graphsent
