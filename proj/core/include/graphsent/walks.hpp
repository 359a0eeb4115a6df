#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graphsent/alias.hpp"
#include "graphsent/errors.hpp"
#include "graphsent/rng.hpp"
#include "graphsent/textgraph.hpp"

namespace graphsent {

struct WalkParams {
  double p = 0.25;        // return parameter
  double q = 0.25;        // in-out parameter
  int walk_length = 40;   // l
  int walks_per_node = 10;  // r
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const {
    if (p <= 0.0 || q <= 0.0) throw ConfigError("walk parameters p and q must be > 0");
    if (walk_length < 2) throw ConfigError("walk_length must be >= 2");
    if (walks_per_node < 1) throw ConfigError("walks_per_node must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
  }
};

/// Search bias for stepping from v to x after arriving via t, keyed on the
/// shortest-path distance d(t, x): 1/p for 0 (return), 1 for 1, 1/q for 2.
double alpha_bias(double p, double q, int d_tx);

/// Normalized next-step distribution out of cur given the walk arrived from
/// prev; entry k corresponds to graph.out(cur)[k]. Mass of successor x is
/// alpha(t, x) * W(cur, x) / Z. Throws DeadEndError when cur has no
/// successors.
std::vector<double> transition_distribution(const WordGraph& graph, int prev, int cur,
                                            double p, double q);

/// Alias tables for every (prev, cur) edge context plus weight-proportional
/// first-step tables per node. O(1) per step after construction.
class TransitionTables {
 public:
  TransitionTables(const WordGraph& graph, double p, double q);

  /// First step out of u, mass proportional to edge weight. Pre: out-degree > 0.
  int sample_first(int u, Rng& rng) const;
  /// Biased step: walk sits at cur having arrived from prev. Pre: edge
  /// (prev, cur) exists and cur has successors.
  int sample_next(int prev, int cur, Rng& rng) const;

  /// Exact per-successor probabilities baked into the (prev, cur) table,
  /// aligned with graph.out(cur); for verification against
  /// transition_distribution.
  std::vector<double> table_distribution(int prev, int cur) const;

 private:
  const WordGraph& graph_;
  std::vector<std::size_t> edge_offset_;     // per node: first out-edge index
  std::vector<AliasTable> edge_tables_;      // one per directed edge (prev->cur)
  std::vector<AliasTable> first_step_;       // one per node with out-degree > 0

  std::size_t edge_index(int prev, int cur) const;
};

/// Node-id sequences from repeated biased walks.
struct WalkCorpus {
  std::vector<std::vector<int>> walks;

  bool empty() const { return walks.empty(); }
  std::size_t size() const { return walks.size(); }
};

/// Runs walks_per_node walks of length <= walk_length from every node.
/// Walks truncate at dead ends; isolated nodes still emit the length-1 walk
/// [u] so they keep receiving training signal. The RNG for walk (u, i) is
/// seeded by hash(seed, u, i), so output is identical for any thread count.
WalkCorpus generate_walks(const WordGraph& graph, const WalkParams& params);

}  // namespace graphsent
