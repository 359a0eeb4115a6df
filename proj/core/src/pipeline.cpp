#include "graphsent/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace graphsent {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  graph_config().validate();
  walk_params().validate();
  skipgram_params().validate();
  cnn_mode_from_string(mode);
  if (filter_widths.empty()) throw ConfigError("filter_widths must not be empty");
  for (int w : filter_widths)
    if (w < 1) throw ConfigError("filter widths must be >= 1");
  if (n_filters < 1) throw ConfigError("n_filters must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
  if (cnn_epochs < 1) throw ConfigError("cnn_epochs must be >= 1");
  if (cnn_lr <= 0.0) throw ConfigError("cnn_lr must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_len_cap < 1) throw ConfigError("max_len_cap must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0))
    throw ConfigError("split_ratio must be in (0, 1)");
  if (valid_ratio < 0.0 || valid_ratio >= 1.0)
    throw ConfigError("valid_ratio must be in [0, 1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  format_from_string(format);
}

WalkParams PipelineConfig::walk_params() const {
  WalkParams params;
  params.p = p;
  params.q = q;
  params.walk_length = walk_length;
  params.walks_per_node = walks_per_node;
  params.seed = derive_seed(seed, "walks");
  params.threads = threads;
  return params;
}

SkipGramParams PipelineConfig::skipgram_params() const {
  SkipGramParams params;
  params.dims = dims;
  params.epochs = embed_epochs;
  params.learning_rate = embed_lr;
  params.negatives = negatives;
  params.context_window = context_window;
  params.seed = derive_seed(seed, "embed");
  params.threads = threads;
  return params;
}

namespace {

template <typename T>
void from_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  PipelineConfig cfg;
  static const std::set<std::string> known = {
      "window", "directed", "weighted", "sentence_split", "p", "q", "walk_length",
      "walks_per_node", "dims", "embed_epochs", "embed_lr", "negatives", "context_window",
      "mode", "filter_widths", "n_filters", "dropout", "hidden_dim", "cnn_epochs",
      "cnn_lr", "batch_size", "max_len_cap", "split_ratio", "valid_ratio", "seed",
      "threads", "format", "strict", "out_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    from_key(j, "window", cfg.window);
    from_key(j, "directed", cfg.directed);
    from_key(j, "weighted", cfg.weighted);
    from_key(j, "sentence_split", cfg.sentence_split);
    from_key(j, "p", cfg.p);
    from_key(j, "q", cfg.q);
    from_key(j, "walk_length", cfg.walk_length);
    from_key(j, "walks_per_node", cfg.walks_per_node);
    from_key(j, "dims", cfg.dims);
    from_key(j, "embed_epochs", cfg.embed_epochs);
    from_key(j, "embed_lr", cfg.embed_lr);
    from_key(j, "negatives", cfg.negatives);
    from_key(j, "context_window", cfg.context_window);
    from_key(j, "mode", cfg.mode);
    from_key(j, "filter_widths", cfg.filter_widths);
    from_key(j, "n_filters", cfg.n_filters);
    from_key(j, "dropout", cfg.dropout);
    from_key(j, "hidden_dim", cfg.hidden_dim);
    from_key(j, "cnn_epochs", cfg.cnn_epochs);
    from_key(j, "cnn_lr", cfg.cnn_lr);
    from_key(j, "batch_size", cfg.batch_size);
    from_key(j, "max_len_cap", cfg.max_len_cap);
    from_key(j, "split_ratio", cfg.split_ratio);
    from_key(j, "valid_ratio", cfg.valid_ratio);
    from_key(j, "seed", cfg.seed);
    from_key(j, "threads", cfg.threads);
    from_key(j, "format", cfg.format);
    from_key(j, "strict", cfg.strict);
    from_key(j, "out_dir", cfg.out_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FileNotFoundError("cannot open config '" + path + "'");
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return from_json_text(buffer.str());
}

std::string PipelineConfig::to_json() const {
  nlohmann::json j;
  j["window"] = window;
  j["directed"] = directed;
  j["weighted"] = weighted;
  j["sentence_split"] = sentence_split;
  j["p"] = p;
  j["q"] = q;
  j["walk_length"] = walk_length;
  j["walks_per_node"] = walks_per_node;
  j["dims"] = dims;
  j["embed_epochs"] = embed_epochs;
  j["embed_lr"] = embed_lr;
  j["negatives"] = negatives;
  j["context_window"] = context_window;
  j["mode"] = mode;
  j["filter_widths"] = filter_widths;
  j["n_filters"] = n_filters;
  j["dropout"] = dropout;
  j["hidden_dim"] = hidden_dim;
  j["cnn_epochs"] = cnn_epochs;
  j["cnn_lr"] = cnn_lr;
  j["batch_size"] = batch_size;
  j["max_len_cap"] = max_len_cap;
  j["split_ratio"] = split_ratio;
  j["valid_ratio"] = valid_ratio;
  j["seed"] = seed;
  j["threads"] = threads;
  j["format"] = format;
  j["strict"] = strict;
  j["out_dir"] = out_dir;
  return j.dump(2) + "\n";
}

GraphStage build_graph_stage(std::span<const LabeledDoc> docs, const GraphConfig& cfg,
                             bool sentence_split) {
  std::vector<TokenSequence> units;
  for (const LabeledDoc& doc : docs) {
    if (sentence_split) {
      const auto sentences = split_sentences(doc.text);
      for (std::size_t s = 0; s < sentences.size(); ++s)
        units.push_back(tokenize(sentences[s], doc.doc_id + "#" + std::to_string(s)));
    } else {
      units.push_back(tokenize(doc.text, doc.doc_id));
    }
  }
  auto [graph, vocab] = build_corpus_graph(units, cfg);
  return {std::move(graph), std::move(vocab), units.size()};
}

EmbeddingMatrix embed_stage(const WordGraph& graph, const PipelineConfig& config,
                            SkipGramStats* stats) {
  const WalkCorpus walks = generate_walks(graph, config.walk_params());
  std::vector<double> noise(graph.node_count());
  for (std::size_t u = 0; u < graph.node_count(); ++u)
    noise[u] = graph.weighted_out_degree(static_cast<int>(u));
  return train_embeddings(walks, graph.node_count(), noise, config.skipgram_params(), stats);
}

int derive_max_len(std::span<const LabeledDoc> docs, const PipelineConfig& config) {
  std::vector<int> lengths;
  lengths.reserve(docs.size());
  for (const LabeledDoc& doc : docs)
    lengths.push_back(static_cast<int>(tokenize(doc.text).size()));
  std::sort(lengths.begin(), lengths.end());
  int max_len = 1;
  if (!lengths.empty()) {
    const auto rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(lengths.size())));
    const std::size_t idx = std::min(lengths.size() - 1, std::max<std::size_t>(rank, 1) - 1);
    max_len = std::max(1, lengths[idx]);
  }
  max_len = std::min(max_len, config.max_len_cap);
  const int widest = *std::max_element(config.filter_widths.begin(), config.filter_widths.end());
  return std::max(max_len, widest);
}

namespace {

template <typename Fn>
auto run_stage(const char* name, std::ostream* log, Fn&& fn) {
  if (log) *log << "[stage] " << name << '\n';
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError("stage '" + std::string(name) + "': " + e.what());
  } catch (const Error& e) {
    throw PipelineStageError(name, e.what());
  }
}

std::vector<Document> encode_corpus(std::span<const LabeledDoc> docs, const Vocabulary& vocab,
                                    int max_len) {
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const LabeledDoc& doc : docs)
    out.push_back(encode_document(tokenize(doc.text, doc.doc_id), vocab, max_len, doc.label));
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os << content;
  if (!os) throw Error("write failure on '" + path.string() + "'");
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config, const LabeledCorpus& corpus,
                       std::ostream* log) {
  config.validate();
  if (corpus.docs.empty()) throw EmptyDatasetError("corpus has no documents");
  {
    std::set<std::string> ids;
    for (const LabeledDoc& doc : corpus.docs) {
      if (!ids.insert(doc.doc_id).second)
        throw ValidationError("duplicate doc_id '" + doc.doc_id + "'");
    }
  }

  const std::uint64_t split_seed = derive_seed(config.seed, "split");
  const std::uint64_t valid_seed = derive_seed(config.seed, "valid");
  const std::uint64_t walk_seed = config.walk_params().seed;
  const std::uint64_t embed_seed = config.skipgram_params().seed;
  const std::uint64_t cnn_init_seed = derive_seed(config.seed, "cnn-init");
  const std::uint64_t cnn_train_seed = derive_seed(config.seed, "cnn-train");
  if (log) {
    *log << "seeds: split=" << split_seed << " valid=" << valid_seed
         << " walks=" << walk_seed << " embed=" << embed_seed
         << " cnn-init=" << cnn_init_seed << " cnn-train=" << cnn_train_seed << '\n';
  }

  auto split_result = run_stage("split", log, [&] { return split(corpus, config.split_ratio, config.seed); });

  // Graph and embeddings never see test text.
  auto graph_stage = run_stage("graph", log, [&] {
    return build_graph_stage(split_result.train.docs, config.graph_config(),
                             config.sentence_split);
  });
  if (log)
    *log << "graph: " << graph_stage.vocab.size() << " nodes, "
         << graph_stage.graph.edge_count() << " edges over " << graph_stage.sentence_units
         << " sentence units\n";

  RunResult result;
  EmbeddingMatrix emb = run_stage("embed", log, [&] {
    return embed_stage(graph_stage.graph, config, &result.embed_stats);
  });

  const int max_len = run_stage("encode", log, [&] {
    return derive_max_len(split_result.train.docs, config);
  });
  if (log) *log << "max_len: " << max_len << '\n';

  // Model selection runs on a carve-out of the train split; the test split
  // stays untouched until the final evaluation.
  LabeledCorpus cnn_train = split_result.train;
  LabeledCorpus cnn_valid;
  cnn_valid.class_names = corpus.class_names;
  if (config.valid_ratio > 0.0) {
    auto carve = run_stage("valid-carve", log, [&] {
      return split(split_result.train, 1.0 - config.valid_ratio, valid_seed);
    });
    cnn_train = std::move(carve.train);
    cnn_valid = std::move(carve.test);
  }

  CnnHyperparams hp;
  hp.max_len = max_len;
  hp.dims = config.dims;
  hp.filter_widths = config.filter_widths;
  hp.filters_per_width = config.n_filters;
  hp.dropout_p = config.dropout;
  hp.hidden_dim = config.hidden_dim;
  hp.n_classes = corpus.n_classes();
  hp.mode = cnn_mode_from_string(config.mode);

  auto train_docs = encode_corpus(cnn_train.docs, graph_stage.vocab, max_len);
  auto valid_docs = encode_corpus(cnn_valid.docs, graph_stage.vocab, max_len);
  auto test_docs = encode_corpus(split_result.test.docs, graph_stage.vocab, max_len);

  CnnModel model = run_stage("cnn-train", log, [&] {
    CnnModel m(hp, emb, graph_stage.vocab.fingerprint(), cnn_init_seed);
    CnnModel::TrainOptions opts;
    opts.epochs = config.cnn_epochs;
    opts.learning_rate = config.cnn_lr;
    opts.batch_size = config.batch_size;
    opts.seed = cnn_train_seed;
    result.cnn_history = m.train(train_docs, valid_docs, opts);
    return m;
  });
  if (log) {
    for (std::size_t e = 0; e < result.cnn_history.train_loss.size(); ++e)
      *log << "epoch " << e << ": loss=" << result.cnn_history.train_loss[e]
           << " valid_acc=" << result.cnn_history.valid_accuracy[e] << '\n';
  }

  run_stage("evaluate", log, [&] {
    std::vector<int> preds, golds;
    preds.reserve(test_docs.size());
    for (const Document& doc : test_docs) {
      preds.push_back(model.predict(doc).first);
      golds.push_back(doc.label);
    }
    const ConfusionMatrix cm = confusion(preds, golds, hp.n_classes);
    result.report = metrics(cm);
    return 0;
  });

  result.class_names = corpus.class_names;
  result.test_accuracy = result.report.accuracy;
  result.overall_f1 = result.report.macro_f1;
  result.max_len = max_len;
  result.vocab_size = graph_stage.vocab.size();
  result.graph_edges = graph_stage.graph.edge_count();
  result.report_text = format_report(result.report, corpus.class_names);
  result.report_json = report_to_json(result.report, corpus.class_names);

  if (!config.out_dir.empty()) {
    run_stage("artifacts", log, [&] {
      const fs::path out(config.out_dir);
      fs::create_directories(out);
      write_text_file(out / "config.json", config.to_json());
      save_vocab(graph_stage.vocab, (out / "vocab.txt").string());
      save_graph(graph_stage.graph, (out / "graph.txt").string());
      save_embedding(emb, graph_stage.vocab, (out / "embeddings.txt").string());
      save_model(model, (out / "model.txt").string());
      write_text_file(out / "report.txt", result.report_text);
      write_text_file(out / "report.json", result.report_json);
      {
        std::ostringstream ids;
        for (const LabeledDoc& d : split_result.train.docs) ids << d.doc_id << '\n';
        write_text_file(out / "split_train.txt", ids.str());
      }
      {
        std::ostringstream ids;
        for (const LabeledDoc& d : split_result.test.docs) ids << d.doc_id << '\n';
        write_text_file(out / "split_test.txt", ids.str());
      }
      {
        std::ostringstream seeds;
        seeds << "split " << split_seed << '\n'
              << "valid " << valid_seed << '\n'
              << "walks " << walk_seed << '\n'
              << "embed " << embed_seed << '\n'
              << "cnn-init " << cnn_init_seed << '\n'
              << "cnn-train " << cnn_train_seed << '\n';
        write_text_file(out / "seeds.txt", seeds.str());
      }
      return 0;
    });
    if (log) *log << "artifacts written to " << config.out_dir << '\n';
  }
  return result;
}

namespace {

template <typename T>
std::vector<T> dedup_values(std::span<const T> values, std::ostream* log, const char* what) {
  std::vector<T> out;
  for (const T& v : values) {
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      if (log) *log << "warning: duplicate " << what << " value dropped\n";
      continue;
    }
    out.push_back(v);
  }
  return out;
}

SweepCell run_cell(PipelineConfig config, const LabeledCorpus& corpus,
                   const std::string& setting, const std::string& cell_tag,
                   std::ostream* log) {
  SweepCell cell;
  cell.setting = setting;
  if (!config.out_dir.empty())
    config.out_dir = (fs::path(config.out_dir) / "cells" / cell_tag).string();
  const auto start = std::chrono::steady_clock::now();
  try {
    const RunResult r = run_pipeline(config, corpus, nullptr);
    cell.overall_f1 = r.overall_f1;
    cell.accuracy = r.test_accuracy;
  } catch (const Error& e) {
    cell.error = e.what();
  }
  cell.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (log) {
    *log << setting << ": "
         << (cell.ok() ? "f1=" + std::to_string(cell.overall_f1) : "error: " + cell.error)
         << " (" << cell.seconds << " s)\n";
  }
  return cell;
}

std::string num_tag(double v) {
  std::ostringstream os;
  os << v;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', '_');
  return s;
}

}  // namespace

std::vector<SweepCell> sweep_pq(const PipelineConfig& config, const LabeledCorpus& corpus,
                                std::span<const double> p_values,
                                std::span<const double> q_values, std::ostream* log) {
  if (p_values.empty() || q_values.empty())
    throw ConfigError("sweep_pq requires non-empty p and q value lists");
  const auto ps = dedup_values(p_values, log, "p");
  const auto qs = dedup_values(q_values, log, "q");

  std::vector<SweepCell> cells;
  for (double pv : ps) {
    for (double qv : qs) {
      PipelineConfig cell_config = config;
      cell_config.p = pv;
      cell_config.q = qv;
      std::ostringstream setting;
      setting << "p=" << pv << " q=" << qv;
      cells.push_back(run_cell(cell_config, corpus, setting.str(),
                               "p" + num_tag(pv) + "_q" + num_tag(qv), log));
    }
  }
  return cells;
}

std::vector<SweepCell> sweep_window(const PipelineConfig& config, const LabeledCorpus& corpus,
                                    std::span<const int> windows, std::ostream* log) {
  if (windows.empty()) throw ConfigError("sweep_window requires a non-empty window list");
  const auto ws = dedup_values(windows, log, "window");
  std::vector<SweepCell> cells;
  for (int w : ws) {
    PipelineConfig cell_config = config;
    cell_config.window = w;
    cells.push_back(run_cell(cell_config, corpus, "window=" + std::to_string(w),
                             "window" + std::to_string(w), log));
  }
  return cells;
}

std::vector<SweepCell> sweep_graph_kind(const PipelineConfig& config,
                                        const LabeledCorpus& corpus, std::ostream* log) {
  std::vector<SweepCell> cells;
  for (bool directed : {true, false}) {
    for (bool weighted : {true, false}) {
      PipelineConfig cell_config = config;
      cell_config.directed = directed;
      cell_config.weighted = weighted;
      const std::string setting = std::string(directed ? "directed" : "undirected") + " " +
                                  (weighted ? "weighted" : "unweighted");
      std::string tag = setting;
      std::replace(tag.begin(), tag.end(), ' ', '_');
      cells.push_back(run_cell(cell_config, corpus, setting, tag, log));
    }
  }
  return cells;
}

std::string format_sweep_table(std::span<const SweepCell> cells) {
  std::size_t width = 10;
  for (const SweepCell& c : cells) width = std::max(width, c.setting.size());
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s %10s %10s %10s\n", static_cast<int>(width),
                "setting", "f1", "accuracy", "seconds");
  os << buf;
  for (const SweepCell& c : cells) {
    if (c.ok()) {
      std::snprintf(buf, sizeof(buf), "%-*s %10.4f %10.4f %10.2f\n",
                    static_cast<int>(width), c.setting.c_str(), c.overall_f1, c.accuracy,
                    c.seconds);
      os << buf;
    } else {
      std::snprintf(buf, sizeof(buf), "%-*s %10s %10s %10.2f  %s\n",
                    static_cast<int>(width), c.setting.c_str(), "-", "-", c.seconds,
                    c.error.c_str());
      os << buf;
    }
  }
  return os.str();
}

}  // namespace graphsent
