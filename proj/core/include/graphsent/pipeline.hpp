#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphsent/convnet.hpp"
#include "graphsent/dataset.hpp"
#include "graphsent/io.hpp"
#include "graphsent/metrics.hpp"
#include "graphsent/skipgram.hpp"
#include "graphsent/textgraph.hpp"
#include "graphsent/walks.hpp"

namespace graphsent {

/// Every knob of the end-to-end run in one place. The JSON config file is a
/// flat key/value document with exactly these field names; CLI flags override
/// file values which override defaults.
struct PipelineConfig {
  // graph
  int window = 3;
  bool directed = true;
  bool weighted = true;
  bool sentence_split = false;  // split documents on [.!?] into sentence units

  // walks
  double p = 0.25;
  double q = 0.25;
  int walk_length = 40;
  int walks_per_node = 10;

  // skip-gram
  int dims = 20;
  int embed_epochs = 5;
  double embed_lr = 0.025;
  int negatives = 5;
  int context_window = 5;

  // convnet
  std::string mode = "static";
  std::vector<int> filter_widths{3, 4};
  int n_filters = 150;
  double dropout = 0.25;
  int hidden_dim = 150;
  int cnn_epochs = 10;
  double cnn_lr = 1e-3;
  int batch_size = 32;
  int max_len_cap = 400;  // caps the 95th-percentile document length

  // orchestration
  double split_ratio = 0.8;
  double valid_ratio = 0.1;  // carved out of the train split for model selection
  std::uint64_t seed = 42;
  int threads = 1;  // >1 drops bitwise determinism of embedding training
  std::string format = "csv";
  bool strict = false;
  std::string out_dir;  // empty: keep everything in memory

  void validate() const;
  GraphConfig graph_config() const { return {window, directed, weighted}; }
  WalkParams walk_params() const;
  SkipGramParams skipgram_params() const;

  static PipelineConfig from_json_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
  std::string to_json() const;
};

/// Vocabulary and merged co-occurrence graph over the given documents.
struct GraphStage {
  WordGraph graph;
  Vocabulary vocab;
  std::size_t sentence_units = 0;
};
GraphStage build_graph_stage(std::span<const LabeledDoc> docs, const GraphConfig& cfg,
                             bool sentence_split);

/// Walks plus skip-gram training; noise distribution comes from weighted
/// graph out-degrees.
EmbeddingMatrix embed_stage(const WordGraph& graph, const PipelineConfig& config,
                            SkipGramStats* stats = nullptr);

/// 95th-percentile token length over the given documents, capped by
/// max_len_cap and floored at the widest filter.
int derive_max_len(std::span<const LabeledDoc> docs, const PipelineConfig& config);

struct RunResult {
  EvalReport report;
  std::vector<std::string> class_names;
  double test_accuracy = 0.0;
  double overall_f1 = 0.0;  // macro-F1 on the test split
  TrainHistory cnn_history;
  SkipGramStats embed_stats;
  int max_len = 0;
  std::size_t vocab_size = 0;
  std::size_t graph_edges = 0;
  std::string report_text;
  std::string report_json;
};

/// Full run: split, graph and embeddings from the train split only, CNN
/// training with a validation carve-out, evaluation on the held-out test
/// split. Writes graph/vocab/embedding/model/report/split/seed artifacts under
/// config.out_dir when set. Deterministic for a fixed (config, seed) in
/// single-threaded mode. Optional log stream receives progress lines and
/// every derived stage seed.
RunResult run_pipeline(const PipelineConfig& config, const LabeledCorpus& corpus,
                       std::ostream* log = nullptr);

struct SweepCell {
  std::string setting;
  double overall_f1 = 0.0;
  double accuracy = 0.0;
  double seconds = 0.0;
  std::string error;  // non-empty when this cell failed validation or at runtime

  bool ok() const { return error.empty(); }
};

/// One full pipeline run per (p, q) pair; the split and all non-walk stage
/// seeds are shared across cells. Duplicate values are dropped with a warning
/// on the log stream.
std::vector<SweepCell> sweep_pq(const PipelineConfig& config, const LabeledCorpus& corpus,
                                std::span<const double> p_values,
                                std::span<const double> q_values,
                                std::ostream* log = nullptr);
std::vector<SweepCell> sweep_window(const PipelineConfig& config, const LabeledCorpus& corpus,
                                    std::span<const int> windows, std::ostream* log = nullptr);
/// The four directed/undirected x weighted/unweighted combinations.
std::vector<SweepCell> sweep_graph_kind(const PipelineConfig& config,
                                        const LabeledCorpus& corpus,
                                        std::ostream* log = nullptr);

std::string format_sweep_table(std::span<const SweepCell> cells);

}  // namespace graphsent
