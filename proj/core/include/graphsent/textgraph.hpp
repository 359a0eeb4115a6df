#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphsent/errors.hpp"

namespace graphsent {

/// Ordered tokens of one sentence unit. Stop words are never filtered out:
/// their position in a sentence carries sentiment signal, so they stay.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::string doc_id;
};

/// Lowercases and splits on whitespace and punctuation boundaries.
/// Punctuation-only tokens are dropped, everything else (including stop words
/// and digits) is kept in document order. Bytes >= 0x80 pass through, so UTF-8
/// text survives untouched apart from ASCII case folding.
std::vector<std::string> tokenize(std::string_view text);
TokenSequence tokenize(std::string_view text, std::string doc_id);

/// Splits raw text into sentence units on [.!?] runs. Used only when the
/// caller wants per-sentence graphs for long documents; short texts are
/// treated as a single unit.
std::vector<std::string> split_sentences(std::string_view text);

/// token <-> dense node id bijection with corpus frequencies.
/// Ids are assigned in first-occurrence order, so identical input order gives
/// identical ids.
class Vocabulary {
 public:
  /// Inserts the token if new, bumps its count either way; returns its id.
  int add(std::string_view token);
  std::optional<int> id(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::int64_t count(int id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }

  /// FNV-1a over tokens in id order; stored in model files so a model can
  /// refuse to run against the wrong vocabulary.
  std::uint64_t fingerprint() const;

  /// Loader-side constructor: registers a token at a fixed id with a given
  /// count. Throws ParseError on id collisions.
  void set(int id, std::string token, std::int64_t count);

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
};

struct GraphConfig {
  int window = 3;  // relation R: positions i < j co-occur when j - i < window
  bool directed = true;
  bool weighted = true;

  void validate() const {
    if (window < 2) throw ConfigError("window must be >= 2 (window 1 produces no edges)");
  }
};

/// Weighted word co-occurrence graph over a fixed vocabulary.
/// Undirected graphs store both directions with equal weight. No self-loops,
/// all weights positive. Immutable once frozen; safe to share across threads.
class WordGraph {
 public:
  struct Edge {
    int dst;
    double weight;
  };

  WordGraph(std::size_t node_count, bool directed)
      : adjacency_(node_count), directed_(directed) {}

  /// Accumulates weight onto (src, dst); undirected graphs mirror the edge.
  /// Throws on self-loops, out-of-range ids, or nonpositive weight.
  void add_edge(int src, int dst, double weight);
  /// Sorts adjacency lists by destination id. Required before lookups.
  void freeze();

  std::size_t node_count() const { return adjacency_.size(); }
  /// Directed edge count; an undirected edge counts once.
  std::size_t edge_count() const;
  bool directed() const { return directed_; }
  std::span<const Edge> out(int node) const {
    return adjacency_.at(static_cast<std::size_t>(node));
  }
  int out_degree(int node) const { return static_cast<int>(out(node).size()); }
  bool has_edge(int src, int dst) const;
  /// 0.0 when the edge is absent.
  double weight(int src, int dst) const;
  /// Sum of outgoing edge weights; the noise distribution is built from this.
  double weighted_out_degree(int node) const;

  /// Deterministic (src, dst, weight) listing, sorted; undirected edges appear
  /// once with src < dst.
  std::vector<std::pair<std::pair<int, int>, double>> edge_list() const;

  /// Scales every weight to exactly 1; used for the unweighted graph kind.
  void clamp_weights_to_unit();

 private:
  std::vector<std::vector<Edge>> adjacency_;
  bool directed_;
  bool frozen_ = false;
};

/// Builds the graph of one sentence unit under relation R: every position pair
/// i < j with j - i < cfg.window adds a co-occurrence. Direction follows text
/// order when directed; repeat pairs accumulate weight when weighted, else the
/// edge weight is fixed at 1. A token repeated at two positions never creates
/// a self-loop.
WordGraph build_sentence_graph(const TokenSequence& tokens, const Vocabulary& vocab,
                               const GraphConfig& cfg);

/// Edge-union with weight summation. All graphs must share node count and
/// directedness. An empty list yields an empty graph.
WordGraph merge_graphs(std::span<const WordGraph> graphs);

/// Vocabulary over all documents plus the merged co-occurrence graph.
/// Each TokenSequence is one sentence unit; callers wanting per-sentence
/// graphs split documents before tokenizing.
std::pair<WordGraph, Vocabulary> build_corpus_graph(std::span<const TokenSequence> documents,
                                                    const GraphConfig& cfg);

}  // namespace graphsent
