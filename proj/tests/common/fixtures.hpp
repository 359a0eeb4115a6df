// Shared fixtures: small graphs with known structure, a synthetic labeled
// corpus with a planted polarity signal, and a few numeric helpers.
#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "graphsent/dataset.hpp"
#include "graphsent/rng.hpp"
#include "graphsent/textgraph.hpp"

namespace fixtures {

// Two 6-cliques joined by a single bridge edge (5 - 6), undirected, unit
// weights. Nodes 0..5 form one community, 6..11 the other.
inline graphsent::WordGraph barbell_graph() {
  graphsent::WordGraph g(12, /*directed=*/false);
  for (int base : {0, 6}) {
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) g.add_edge(base + i, base + j, 1.0);
  }
  g.add_edge(5, 6, 1.0);
  g.freeze();
  return g;
}

// Ring of cliques: n_cliques k-cliques, consecutive cliques joined by one
// bridge edge. Enough community structure for embedding training to have
// something to learn.
inline graphsent::WordGraph ring_of_cliques(int n_cliques, int clique_size) {
  const int n = n_cliques * clique_size;
  graphsent::WordGraph g(static_cast<std::size_t>(n), /*directed=*/false);
  for (int c = 0; c < n_cliques; ++c) {
    const int base = c * clique_size;
    for (int i = 0; i < clique_size; ++i)
      for (int j = i + 1; j < clique_size; ++j) g.add_edge(base + i, base + j, 1.0);
    g.add_edge(base + clique_size - 1, (base + clique_size) % n, 1.0);
  }
  g.freeze();
  return g;
}

// Five-node weighted digraph with varied weights. Several (prev, cur)
// contexts expose all three alpha cases: returning to prev, moving to a
// neighbor of prev, and jumping to a non-neighbor of prev.
inline graphsent::WordGraph five_node_digraph() {
  graphsent::WordGraph g(5, /*directed=*/true);
  g.add_edge(0, 1, 1.0);
  g.add_edge(0, 2, 2.0);
  g.add_edge(1, 0, 2.0);
  g.add_edge(1, 2, 1.0);
  g.add_edge(2, 0, 1.0);
  g.add_edge(2, 1, 1.0);
  g.add_edge(2, 3, 2.0);
  g.add_edge(3, 1, 2.0);
  g.add_edge(3, 4, 1.0);
  g.add_edge(4, 1, 3.0);
  g.freeze();
  return g;
}

// Directed chain a -> b -> c as a (graph, vocab) pair.
inline std::pair<graphsent::WordGraph, graphsent::Vocabulary> chain_graph() {
  graphsent::Vocabulary vocab;
  vocab.add("a");
  vocab.add("b");
  vocab.add("c");
  graphsent::WordGraph g(3, /*directed=*/true);
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 2, 1.0);
  g.freeze();
  return {std::move(g), std::move(vocab)};
}

// Synthetic polarity corpus: filler tokens shared by both classes plus ten
// class-indicative tokens (five per class). Every document carries at least
// one contiguous phrase of its own class's indicators, so same-class
// indicators co-occur, form a community in the word graph, and embed close
// together; the classification ceiling is known by construction.
inline graphsent::LabeledCorpus planted_corpus(std::size_t docs_per_class,
                                               std::size_t filler_vocab = 190,
                                               std::uint64_t seed = 7,
                                               int min_len = 8, int max_len = 20) {
  graphsent::LabeledCorpus corpus;
  corpus.class_names = {"negative", "positive"};
  graphsent::Rng rng(seed);

  std::vector<std::string> filler;
  for (std::size_t i = 0; i < filler_vocab; ++i) filler.push_back("w" + std::to_string(i));
  const std::vector<std::string> indicators[2] = {
      {"awful", "dreadful", "boring", "horrible", "lousy"},
      {"great", "superb", "delightful", "charming", "brilliant"},
  };

  std::size_t doc_no = 0;
  for (int label = 0; label < 2; ++label) {
    for (std::size_t k = 0; k < docs_per_class; ++k) {
      const int length = min_len + static_cast<int>(rng.next_below(
                                       static_cast<std::uint64_t>(max_len - min_len + 1)));
      std::vector<std::string> words;
      for (int i = 0; i < length; ++i)
        words.push_back(filler[static_cast<std::size_t>(rng.next_below(filler.size()))]);
      const auto& pool = indicators[label];
      const int phrase_len = 2 + static_cast<int>(rng.next_below(2));
      std::vector<std::string> phrase;
      for (int m = 0; m < phrase_len; ++m)
        phrase.push_back(pool[static_cast<std::size_t>(rng.next_below(pool.size()))]);
      const std::size_t at = static_cast<std::size_t>(rng.next_below(words.size() + 1));
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), phrase.begin(),
                   phrase.end());
      std::string text;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) text += ' ';
        text += words[i];
      }
      corpus.docs.push_back({"doc" + std::to_string(doc_no++), label, text});
    }
  }
  return corpus;
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return tv / 2.0;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb) + 1e-12);
}

inline std::string write_temp_file(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/graphsent_test_") + name;
  std::FILE* f = std::fopen(path.c_str(), "wb");
  std::fwrite(content.data(), 1, content.size(), f);
  std::fclose(f);
  return path;
}

}  // namespace fixtures
