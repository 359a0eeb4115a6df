#pragma once

#include <string>

#include "graphsent/skipgram.hpp"
#include "graphsent/textgraph.hpp"

namespace graphsent {

/// Line-oriented graph format: header "GRAPH <|V|> <directed|undirected>",
/// then one edge per line "src<TAB>dst<TAB>weight". Undirected edges are
/// listed once with src < dst.
void save_graph(const WordGraph& graph, const std::string& path);
WordGraph load_graph(const std::string& path);

/// One "id<TAB>token" line per node, UTF-8, ids ascending.
void save_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

/// Header "<|V|> <d>", then one "token v_1 ... v_d" line per node with
/// 6-significant-digit values. Round-trips losslessly at that precision.
/// Only center vectors are stored; context vectors are training state.
void save_embedding(const EmbeddingMatrix& emb, const Vocabulary& vocab,
                    const std::string& path);
std::pair<EmbeddingMatrix, std::vector<std::string>> load_embedding(const std::string& path);

}  // namespace graphsent
