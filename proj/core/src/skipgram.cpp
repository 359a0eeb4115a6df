#include "graphsent/skipgram.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "graphsent/alias.hpp"
#include "graphsent/rng.hpp"

namespace graphsent {

bool EmbeddingMatrix::all_finite() const {
  for (double v : center_)
    if (!std::isfinite(v)) return false;
  for (double v : context_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<std::pair<int, int>> skipgram_pairs(std::span<const int> walk,
                                                int context_window) {
  if (context_window < 1) throw ConfigError("context_window must be >= 1");
  std::vector<std::pair<int, int>> pairs;
  const int n = static_cast<int>(walk.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - context_window);
    const int hi = std::min(n - 1, i + context_window);
    for (int j = lo; j <= hi; ++j) {
      if (j == i) continue;
      pairs.emplace_back(walk[static_cast<std::size_t>(i)],
                         walk[static_cast<std::size_t>(j)]);
    }
  }
  return pairs;
}

namespace {

// ln sigma(x) without overflow at either tail.
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double negative_sampling_loss(const EmbeddingMatrix& emb, int center, int context,
                              std::span<const int> negatives, PairGradients* grads) {
  if (negatives.empty())
    throw ConfigError("negative_sampling_loss requires at least one negative sample");
  const std::size_t d = emb.dims();
  const auto fc = emb.center(center);

  const double pos_score = dot(fc, emb.context(context));
  double loss = -log_sigmoid(pos_score);

  if (grads) {
    grads->center.assign(d, 0.0);
    grads->context.assign(d, 0.0);
    grads->negatives.assign(negatives.size(), std::vector<double>(d, 0.0));
  }

  // d(-ln s(x))/dx = s(x) - 1 for the observed pair, s(x) for noise pairs.
  const double g_pos = sigmoid(pos_score) - 1.0;
  if (grads) {
    const auto fctx = emb.context(context);
    for (std::size_t i = 0; i < d; ++i) {
      grads->center[i] += g_pos * fctx[i];
      grads->context[i] = g_pos * fc[i];
    }
  }

  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const auto fneg = emb.context(negatives[k]);
    const double neg_score = dot(fc, fneg);
    loss -= log_sigmoid(-neg_score);
    if (grads) {
      const double g_neg = sigmoid(neg_score);
      for (std::size_t i = 0; i < d; ++i) {
        grads->center[i] += g_neg * fneg[i];
        grads->negatives[k][i] = g_neg * fc[i];
      }
    }
  }
  return loss;
}

namespace {

// One fused SGD step over a (center, context) pair: identical math to
// negative_sampling_loss plus the update, without per-pair allocation.
// Reads and writes go through relaxed atomic_ref so the asynchronous
// multi-thread mode stays well-defined; single-threaded this compiles to
// plain loads and stores.
double train_pair(EmbeddingMatrix& emb, int center, int context,
                  std::span<const int> negatives, double lr,
                  std::vector<double>& center_delta) {
  const std::size_t d = emb.dims();
  auto fc = emb.center(center);
  center_delta.assign(d, 0.0);

  auto load = [](const double& x) {
    return std::atomic_ref<const double>(x).load(std::memory_order_relaxed);
  };
  auto store = [](double& x, double v) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  };

  double loss = 0.0;
  for (std::size_t k = 0; k <= negatives.size(); ++k) {
    const bool positive = (k == negatives.size());
    const int target = positive ? context : negatives[k];
    auto ft = emb.context(target);

    double score = 0.0;
    for (std::size_t i = 0; i < d; ++i) score += load(fc[i]) * load(ft[i]);
    loss += positive ? -log_sigmoid(score) : -log_sigmoid(-score);

    const double g = sigmoid(score) - (positive ? 1.0 : 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double fci = load(fc[i]);
      center_delta[i] += g * load(ft[i]);
      store(ft[i], load(ft[i]) - lr * g * fci);
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    store(fc[i], load(fc[i]) - lr * center_delta[i]);
  return loss;
}

}  // namespace

EmbeddingMatrix train_embeddings(const WalkCorpus& walks, std::size_t node_count,
                                 std::span<const double> noise_weights,
                                 const SkipGramParams& params, SkipGramStats* stats) {
  params.validate();
  if (walks.empty()) throw EmptyWalkCorpusError("walk corpus is empty");
  if (node_count == 0) throw EmptyGraphError("node_count must be positive");
  if (noise_weights.size() != node_count)
    throw DimensionMismatchError("noise_weights size differs from node_count");

  const std::size_t d = static_cast<std::size_t>(params.dims);
  EmbeddingMatrix emb(node_count, d);
  {
    Rng init_rng(derive_seed(params.seed, "init"));
    const double bound = 0.5 / static_cast<double>(d);
    for (double& v : emb.center_data()) v = init_rng.next_double(-bound, bound);
  }

  std::vector<double> powered(node_count);
  double total_noise = 0.0;
  for (std::size_t i = 0; i < node_count; ++i) {
    powered[i] = noise_weights[i] > 0.0 ? std::pow(noise_weights[i], params.noise_power) : 0.0;
    total_noise += powered[i];
  }
  if (total_noise <= 0.0) powered.assign(node_count, 1.0);  // uniform fallback
  const AliasTable noise(powered);

  // Total pair count drives the linear learning-rate decay.
  std::uint64_t total_pairs = 0;
  for (const auto& walk : walks.walks) {
    const std::int64_t n = static_cast<std::int64_t>(walk.size());
    for (std::int64_t i = 0; i < n; ++i) {
      total_pairs += static_cast<std::uint64_t>(
          std::min<std::int64_t>(n - 1, i + params.context_window) -
          std::max<std::int64_t>(0, i - params.context_window));
    }
  }
  const std::uint64_t schedule = std::max<std::uint64_t>(
      1, total_pairs * static_cast<std::uint64_t>(std::max(params.epochs, 1)));

  if (stats) stats->epoch_mean_loss.clear();

  std::atomic<std::uint64_t> progress{0};

  auto train_shard = [&](int epoch, int tid, int stride, double* loss_out,
                         std::uint64_t* pairs_out) {
    Rng rng(mix_seed(derive_seed(params.seed, "train"), static_cast<std::uint64_t>(epoch),
                     static_cast<std::uint64_t>(tid)));
    std::vector<double> center_delta(d);
    std::vector<int> negs;
    double loss_sum = 0.0;
    std::uint64_t pair_count = 0;
    std::uint64_t local_progress = 0;

    for (std::size_t w = static_cast<std::size_t>(tid); w < walks.walks.size();
         w += static_cast<std::size_t>(stride)) {
      const auto& walk = walks.walks[w];
      const int n = static_cast<int>(walk.size());
      for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - params.context_window);
        const int hi = std::min(n - 1, i + params.context_window);
        for (int j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const int center = walk[static_cast<std::size_t>(i)];
          const int context = walk[static_cast<std::size_t>(j)];

          negs.clear();
          for (int k = 0; k < params.negatives; ++k) {
            const int cand = noise.sample(rng);
            if (cand == context) continue;  // never contrast a pair against itself
            negs.push_back(cand);
          }

          // Linear decay over the whole schedule, floored at 1e-4 of lr0.
          const std::uint64_t done = progress.load(std::memory_order_relaxed) + local_progress;
          const double frac = static_cast<double>(done) / static_cast<double>(schedule);
          const double lr = params.learning_rate * std::max(1.0 - frac, 1e-4);

          ++local_progress;
          if (negs.empty()) continue;  // every draw hit the context; rare
          loss_sum += train_pair(emb, center, context, negs, lr, center_delta);
          ++pair_count;
        }
      }
      if (local_progress > 4096) {
        progress.fetch_add(local_progress, std::memory_order_relaxed);
        local_progress = 0;
      }
    }
    progress.fetch_add(local_progress, std::memory_order_relaxed);
    *loss_out = loss_sum;
    *pairs_out = pair_count;
  };

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::uint64_t epoch_pairs = 0;
    if (params.threads <= 1) {
      train_shard(epoch, 0, 1, &epoch_loss, &epoch_pairs);
    } else {
      std::vector<double> losses(static_cast<std::size_t>(params.threads), 0.0);
      std::vector<std::uint64_t> counts(static_cast<std::size_t>(params.threads), 0);
      std::vector<std::thread> pool;
      for (int t = 0; t < params.threads; ++t) {
        pool.emplace_back(train_shard, epoch, t, params.threads,
                          &losses[static_cast<std::size_t>(t)],
                          &counts[static_cast<std::size_t>(t)]);
      }
      for (auto& th : pool) th.join();
      for (double l : losses) epoch_loss += l;
      for (std::uint64_t c : counts) epoch_pairs += c;
    }
    if (stats) {
      stats->epoch_mean_loss.push_back(epoch_pairs > 0 ? epoch_loss / static_cast<double>(epoch_pairs)
                                                       : 0.0);
    }
  }
  return emb;
}

}  // namespace graphsent
