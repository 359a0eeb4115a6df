#include "graphsent/walks.hpp"

#include <algorithm>
#include <thread>

namespace graphsent {

double alpha_bias(double p, double q, int d_tx) {
  switch (d_tx) {
    case 0: return 1.0 / p;
    case 1: return 1.0;
    case 2: return 1.0 / q;
    default:
      throw InvalidDistanceError("d_tx must be one of {0, 1, 2}, got " +
                                 std::to_string(d_tx));
  }
}

namespace {

// Unnormalized pi_vx = alpha_pq(t, x) * W_vx for every successor x of cur.
std::vector<double> biased_masses(const WordGraph& graph, int prev, int cur, double p,
                                  double q) {
  const auto successors = graph.out(cur);
  std::vector<double> mass(successors.size());
  for (std::size_t k = 0; k < successors.size(); ++k) {
    const int x = successors[k].dst;
    int d;
    if (x == prev) {
      d = 0;
    } else if (graph.has_edge(prev, x)) {
      d = 1;
    } else {
      d = 2;
    }
    mass[k] = alpha_bias(p, q, d) * successors[k].weight;
  }
  return mass;
}

}  // namespace

std::vector<double> transition_distribution(const WordGraph& graph, int prev, int cur,
                                            double p, double q) {
  if (graph.out_degree(cur) == 0)
    throw DeadEndError("node " + std::to_string(cur) + " has no successors");
  std::vector<double> mass = biased_masses(graph, prev, cur, p, q);
  double z = 0.0;
  for (double m : mass) z += m;
  for (double& m : mass) m /= z;
  return mass;
}

TransitionTables::TransitionTables(const WordGraph& graph, double p, double q)
    : graph_(graph) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw EmptyGraphError("cannot build transition tables for an empty graph");

  edge_offset_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u)
    edge_offset_[u + 1] = edge_offset_[u] + graph.out(static_cast<int>(u)).size();

  first_step_.resize(n);
  std::vector<double> weights;
  for (std::size_t u = 0; u < n; ++u) {
    const auto edges = graph.out(static_cast<int>(u));
    if (edges.empty()) continue;
    weights.clear();
    for (const auto& e : edges) weights.push_back(e.weight);
    first_step_[u] = AliasTable(weights);
  }

  edge_tables_.resize(edge_offset_[n]);
  for (std::size_t t = 0; t < n; ++t) {
    const auto edges = graph.out(static_cast<int>(t));
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const int v = edges[k].dst;
      if (graph.out_degree(v) == 0) continue;  // dead end, walk truncates there
      edge_tables_[edge_offset_[t] + k] =
          AliasTable(biased_masses(graph, static_cast<int>(t), v, p, q));
    }
  }
}

std::size_t TransitionTables::edge_index(int prev, int cur) const {
  const auto edges = graph_.out(prev);
  auto it = std::lower_bound(edges.begin(), edges.end(), cur,
                             [](const WordGraph::Edge& e, int d) { return e.dst < d; });
  if (it == edges.end() || it->dst != cur)
    throw Error("transition lookup for a non-edge (" + std::to_string(prev) + ", " +
                std::to_string(cur) + ")");
  return edge_offset_[static_cast<std::size_t>(prev)] +
         static_cast<std::size_t>(it - edges.begin());
}

int TransitionTables::sample_first(int u, Rng& rng) const {
  const auto& table = first_step_[static_cast<std::size_t>(u)];
  if (table.size() == 0) throw DeadEndError("node " + std::to_string(u) + " is isolated");
  return graph_.out(u)[static_cast<std::size_t>(table.sample(rng))].dst;
}

int TransitionTables::sample_next(int prev, int cur, Rng& rng) const {
  const auto& table = edge_tables_[edge_index(prev, cur)];
  if (table.size() == 0)
    throw DeadEndError("node " + std::to_string(cur) + " has no successors");
  return graph_.out(cur)[static_cast<std::size_t>(table.sample(rng))].dst;
}

std::vector<double> TransitionTables::table_distribution(int prev, int cur) const {
  const auto& table = edge_tables_[edge_index(prev, cur)];
  std::vector<double> probs(table.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = table.probability(i);
  return probs;
}

WalkCorpus generate_walks(const WordGraph& graph, const WalkParams& params) {
  params.validate();
  const std::size_t n = graph.node_count();
  if (n == 0) throw EmptyGraphError("cannot walk an empty graph");

  const TransitionTables tables(graph, params.p, params.q);
  const int r = params.walks_per_node;

  WalkCorpus corpus;
  corpus.walks.assign(static_cast<std::size_t>(r) * n, {});

  auto run_walk = [&](int round, int start) {
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(start),
                     static_cast<std::uint64_t>(round)));
    std::vector<int>& walk =
        corpus.walks[static_cast<std::size_t>(round) * n + static_cast<std::size_t>(start)];
    walk.reserve(static_cast<std::size_t>(params.walk_length));
    walk.push_back(start);
    if (graph.out_degree(start) == 0) return;  // isolated: emit [u]
    walk.push_back(tables.sample_first(start, rng));
    while (static_cast<int>(walk.size()) < params.walk_length) {
      const int cur = walk.back();
      if (graph.out_degree(cur) == 0) break;
      walk.push_back(tables.sample_next(walk[walk.size() - 2], cur, rng));
    }
  };

  const std::size_t total = static_cast<std::size_t>(r) * n;
  if (params.threads <= 1) {
    for (int round = 0; round < r; ++round)
      for (std::size_t u = 0; u < n; ++u) run_walk(round, static_cast<int>(u));
  } else {
    // Walk (u, i) has its own derived seed and its own output slot, so any
    // partition of the index space yields the identical corpus.
    const int n_threads = params.threads;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t idx = static_cast<std::size_t>(t); idx < total;
             idx += static_cast<std::size_t>(n_threads)) {
          run_walk(static_cast<int>(idx / n), static_cast<int>(idx % n));
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return corpus;
}

}  // namespace graphsent
