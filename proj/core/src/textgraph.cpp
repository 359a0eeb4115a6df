#include "graphsent/textgraph.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace graphsent {

namespace {

bool is_token_char(unsigned char c) {
  // ASCII letters and digits, plus anything non-ASCII (UTF-8 continuation and
  // lead bytes). ASCII punctuation, whitespace and control are boundaries.
  return std::isalnum(c) || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

TokenSequence tokenize(std::string_view text, std::string doc_id) {
  return TokenSequence{tokenize(text), std::move(doc_id)};
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> units;
  std::string current;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      if (!current.empty()) {
        units.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) units.push_back(std::move(current));
  // Drop units that carry no tokens at all (e.g. stray whitespace between
  // terminators).
  std::erase_if(units, [](const std::string& u) {
    return std::all_of(u.begin(), u.end(),
                       [](unsigned char c) { return !is_token_char(c); });
  });
  return units;
}

int Vocabulary::add(std::string_view token) {
  auto it = index_.find(std::string(token));
  if (it != index_.end()) {
    ++counts_[static_cast<std::size_t>(it->second)];
    return it->second;
  }
  const int id = static_cast<int>(tokens_.size());
  tokens_.emplace_back(token);
  counts_.push_back(1);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::optional<int> Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::string& t : tokens_) {
    for (char c : t) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  return h;
}

void Vocabulary::set(int id, std::string token, std::int64_t count) {
  if (id < 0) throw ParseError("vocabulary: negative id");
  const auto idx = static_cast<std::size_t>(id);
  if (idx >= tokens_.size()) {
    tokens_.resize(idx + 1);
    counts_.resize(idx + 1, 0);
  }
  if (!tokens_[idx].empty()) throw ParseError("vocabulary: duplicate id " + std::to_string(id));
  if (index_.contains(token)) throw ParseError("vocabulary: duplicate token '" + token + "'");
  tokens_[idx] = std::move(token);
  counts_[idx] = count;
  index_.emplace(tokens_[idx], id);
}

void WordGraph::add_edge(int src, int dst, double weight) {
  if (src == dst) throw Error("WordGraph: self-loops are excluded");
  const auto n = static_cast<int>(adjacency_.size());
  if (src < 0 || src >= n || dst < 0 || dst >= n)
    throw Error("WordGraph: node id out of range");
  if (weight <= 0.0) throw Error("WordGraph: edge weight must be positive");
  frozen_ = false;

  auto bump = [this](int a, int b, double w) {
    auto& list = adjacency_[static_cast<std::size_t>(a)];
    for (Edge& e : list) {
      if (e.dst == b) {
        e.weight += w;
        return;
      }
    }
    list.push_back(Edge{b, w});
  };
  bump(src, dst, weight);
  if (!directed_) bump(dst, src, weight);
}

void WordGraph::freeze() {
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Edge& a, const Edge& b) { return a.dst < b.dst; });
  }
  frozen_ = true;
}

std::size_t WordGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return directed_ ? total : total / 2;
}

bool WordGraph::has_edge(int src, int dst) const {
  const auto& list = adjacency_.at(static_cast<std::size_t>(src));
  if (frozen_) {
    auto it = std::lower_bound(list.begin(), list.end(), dst,
                               [](const Edge& e, int d) { return e.dst < d; });
    return it != list.end() && it->dst == dst;
  }
  return std::any_of(list.begin(), list.end(), [dst](const Edge& e) { return e.dst == dst; });
}

double WordGraph::weight(int src, int dst) const {
  const auto& list = adjacency_.at(static_cast<std::size_t>(src));
  if (frozen_) {
    auto it = std::lower_bound(list.begin(), list.end(), dst,
                               [](const Edge& e, int d) { return e.dst < d; });
    return (it != list.end() && it->dst == dst) ? it->weight : 0.0;
  }
  for (const Edge& e : list)
    if (e.dst == dst) return e.weight;
  return 0.0;
}

double WordGraph::weighted_out_degree(int node) const {
  double total = 0.0;
  for (const Edge& e : out(node)) total += e.weight;
  return total;
}

std::vector<std::pair<std::pair<int, int>, double>> WordGraph::edge_list() const {
  std::vector<std::pair<std::pair<int, int>, double>> edges;
  const int n = static_cast<int>(adjacency_.size());
  for (int u = 0; u < n; ++u) {
    for (const Edge& e : adjacency_[static_cast<std::size_t>(u)]) {
      if (!directed_ && e.dst < u) continue;  // undirected edges listed once
      edges.push_back({{u, e.dst}, e.weight});
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

void WordGraph::clamp_weights_to_unit() {
  for (auto& list : adjacency_)
    for (Edge& e : list) e.weight = 1.0;
}

WordGraph build_sentence_graph(const TokenSequence& tokens, const Vocabulary& vocab,
                               const GraphConfig& cfg) {
  cfg.validate();
  std::vector<int> ids;
  ids.reserve(tokens.tokens.size());
  for (const std::string& t : tokens.tokens) {
    const auto id = vocab.id(t);
    if (!id) throw UnknownTokenError("token '" + t + "' missing from vocabulary");
    ids.push_back(*id);
  }

  WordGraph g(vocab.size(), cfg.directed);
  const int n = static_cast<int>(ids.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n && j - i < cfg.window; ++j) {
      if (ids[i] == ids[j]) continue;  // same node at two positions: no self-loop
      g.add_edge(ids[i], ids[j], 1.0);
    }
  }
  if (!cfg.weighted) g.clamp_weights_to_unit();
  g.freeze();
  return g;
}

WordGraph merge_graphs(std::span<const WordGraph> graphs) {
  if (graphs.empty()) {
    WordGraph g(0, true);
    g.freeze();
    return g;
  }
  const bool directed = graphs.front().directed();
  const std::size_t nodes = graphs.front().node_count();
  for (const WordGraph& g : graphs) {
    if (g.directed() != directed)
      throw MixedGraphKindsError("merge_graphs: directedness flags differ");
    if (g.node_count() != nodes)
      throw MixedGraphKindsError("merge_graphs: graphs span different vocabularies");
  }

  WordGraph merged(nodes, directed);
  for (const WordGraph& g : graphs) {
    for (const auto& [edge, w] : g.edge_list()) merged.add_edge(edge.first, edge.second, w);
  }
  merged.freeze();
  return merged;
}

std::pair<WordGraph, Vocabulary> build_corpus_graph(std::span<const TokenSequence> documents,
                                                    const GraphConfig& cfg) {
  cfg.validate();
  Vocabulary vocab;
  bool any_token = false;
  for (const TokenSequence& doc : documents) {
    for (const std::string& t : doc.tokens) {
      vocab.add(t);
      any_token = true;
    }
  }
  if (!any_token) throw EmptyCorpusError("corpus has no non-empty document");

  // Accumulates all sentence graphs directly instead of materializing one
  // graph per document; equivalent to merge_graphs over the per-sentence
  // builds (covered by a test).
  std::vector<std::map<int, double>> acc(vocab.size());
  std::vector<int> ids;
  for (const TokenSequence& doc : documents) {
    ids.clear();
    for (const std::string& t : doc.tokens) ids.push_back(*vocab.id(t));
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n && j - i < cfg.window; ++j) {
        if (ids[i] == ids[j]) continue;
        int a = ids[i], b = ids[j];
        if (!cfg.directed && a > b) std::swap(a, b);
        acc[static_cast<std::size_t>(a)][b] += 1.0;
      }
    }
  }

  WordGraph g(vocab.size(), cfg.directed);
  for (int u = 0; u < static_cast<int>(acc.size()); ++u) {
    for (const auto& [v, w] : acc[static_cast<std::size_t>(u)]) g.add_edge(u, v, w);
  }
  if (!cfg.weighted) g.clamp_weights_to_unit();
  g.freeze();
  return {std::move(g), std::move(vocab)};
}

}  // namespace graphsent
