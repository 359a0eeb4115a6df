#include "graphsent/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace graphsent {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FileNotFoundError("cannot open '" + path + "'");
  return is;
}

}  // namespace

void save_graph(const WordGraph& graph, const std::string& path) {
  auto os = open_out(path);
  os << "GRAPH " << graph.node_count() << ' '
     << (graph.directed() ? "directed" : "undirected") << '\n';
  char buf[32];
  for (const auto& [edge, w] : graph.edge_list()) {
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    os << edge.first << '\t' << edge.second << '\t' << buf << '\n';
  }
  if (!os) throw Error("write failure on '" + path + "'");
}

WordGraph load_graph(const std::string& path) {
  auto is = open_in(path);
  std::string magic, kind;
  std::size_t nodes = 0;
  if (!(is >> magic >> nodes >> kind) || magic != "GRAPH" ||
      (kind != "directed" && kind != "undirected"))
    throw ParseError("not a graph file: '" + path + "'");

  WordGraph g(nodes, kind == "directed");
  int src, dst;
  double w;
  while (is >> src >> dst >> w) {
    try {
      g.add_edge(src, dst, w);
    } catch (const Error& e) {
      throw ParseError("graph file '" + path + "': " + e.what());
    }
  }
  if (!is.eof()) throw ParseError("graph file '" + path + "': malformed edge line");
  g.freeze();
  return g;
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  auto os = open_out(path);
  for (std::size_t id = 0; id < vocab.size(); ++id)
    os << id << '\t' << vocab.token(static_cast<int>(id)) << '\n';
  if (!os) throw Error("write failure on '" + path + "'");
}

Vocabulary load_vocab(const std::string& path) {
  auto is = open_in(path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("vocab file '" + path + "' line " + std::to_string(line_no) +
                       ": missing tab");
    int id;
    try {
      id = std::stoi(line.substr(0, tab));
    } catch (const std::exception&) {
      throw ParseError("vocab file '" + path + "' line " + std::to_string(line_no) +
                       ": bad id");
    }
    vocab.set(id, line.substr(tab + 1), 0);
  }
  return vocab;
}

void save_embedding(const EmbeddingMatrix& emb, const Vocabulary& vocab,
                    const std::string& path) {
  if (vocab.size() != emb.rows())
    throw DimensionMismatchError("vocabulary size differs from embedding rows");
  auto os = open_out(path);
  os << emb.rows() << ' ' << emb.dims() << '\n';
  char buf[32];
  for (std::size_t id = 0; id < emb.rows(); ++id) {
    os << vocab.token(static_cast<int>(id));
    for (double v : emb.center(static_cast<int>(id))) {
      std::snprintf(buf, sizeof(buf), "%.6g", v);
      os << ' ' << buf;
    }
    os << '\n';
  }
  if (!os) throw Error("write failure on '" + path + "'");
}

std::pair<EmbeddingMatrix, std::vector<std::string>> load_embedding(const std::string& path) {
  auto is = open_in(path);
  std::size_t rows = 0, dims = 0;
  if (!(is >> rows >> dims) || dims == 0)
    throw ParseError("not an embedding file: '" + path + "'");
  EmbeddingMatrix emb(rows, dims);
  std::vector<std::string> tokens(rows);
  for (std::size_t id = 0; id < rows; ++id) {
    if (!(is >> tokens[id])) throw ParseError("embedding file '" + path + "': truncated");
    for (double& v : emb.center(static_cast<int>(id))) {
      if (!(is >> v)) throw ParseError("embedding file '" + path + "': truncated row");
    }
  }
  return {std::move(emb), std::move(tokens)};
}

}  // namespace graphsent
