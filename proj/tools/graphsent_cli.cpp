// Command-line front end: stage subcommands plus the end-to-end `run` and the
// sensitivity `sweep`. Exit codes: 0 success, 1 validation error, 2 runtime
// error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "graphsent/pipeline.hpp"

namespace fs = std::filesystem;
using namespace graphsent;

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric list entry '" + item + "'");
    }
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> values;
  for (double v : parse_double_list(csv)) values.push_back(static_cast<int>(v));
  return values;
}

// Flag values land here; only flags the user actually passed override the
// config file, which in turn overrides defaults.
struct CliArgs {
  std::string config_path;
  std::string dataset;
  std::string format = "csv";
  int window = 3;
  double p = 0.25, q = 0.25;
  int dims = 20;
  std::string mode = "static";
  std::uint64_t seed = 42;
  std::string out;
  bool undirected = false, unweighted = false, sentence_split = false, strict = false;
  int threads = 1;

  std::string graph_path, vocab_path, embeddings_path, model_path, text;
  std::string sweep_type = "pq";
  std::string p_values = "0.25,0.5,1,2,4";
  std::string q_values = "0.25,0.5,1,2,4";
  std::string windows = "2,3,4,5";
};

void add_common_flags(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--format", args.format, "dataset format: csv|tsv");
  cmd->add_option("--window", args.window, "co-occurrence window (>= 2)");
  cmd->add_option("--p", args.p, "walk return parameter");
  cmd->add_option("--q", args.q, "walk in-out parameter");
  cmd->add_option("--dims", args.dims, "embedding dimensions");
  cmd->add_option("--mode", args.mode, "CNN mode: rand|static|non-static|multichannel");
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_flag("--undirected", args.undirected, "build an undirected graph");
  cmd->add_flag("--unweighted", args.unweighted, "fix all edge weights at 1");
  cmd->add_flag("--sentence-split", args.sentence_split, "split documents on [.!?]");
  cmd->add_flag("--strict", args.strict, "treat malformed dataset rows as errors");
  cmd->add_option("--threads", args.threads, "worker threads (1 = fully deterministic)");
}

PipelineConfig resolve_config(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg;
  if (!args.config_path.empty()) cfg = PipelineConfig::from_json_file(args.config_path);

  auto passed = [cmd](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  if (passed("--format")) cfg.format = args.format;
  if (passed("--window")) cfg.window = args.window;
  if (passed("--p")) cfg.p = args.p;
  if (passed("--q")) cfg.q = args.q;
  if (passed("--dims")) cfg.dims = args.dims;
  if (passed("--mode")) cfg.mode = args.mode;
  if (passed("--seed")) cfg.seed = args.seed;
  if (passed("--out")) cfg.out_dir = args.out;
  if (passed("--undirected")) cfg.directed = false;
  if (passed("--unweighted")) cfg.weighted = false;
  if (passed("--sentence-split")) cfg.sentence_split = true;
  if (passed("--strict")) cfg.strict = true;
  if (passed("--threads")) cfg.threads = args.threads;
  return cfg;
}

LabeledCorpus load_corpus(const std::string& path, const PipelineConfig& cfg) {
  LoadOptions options;
  options.format = format_from_string(cfg.format);
  options.strict = cfg.strict;
  LoadedDataset loaded = load_dataset(path, options);
  for (const std::string& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(loaded.corpus);
}

void require_out(const PipelineConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("--out <dir> is required for this command");
  fs::create_directories(cfg.out_dir);
}

int cmd_graph(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg = resolve_config(cmd, args);
  cfg.graph_config().validate();
  require_out(cfg);
  const LabeledCorpus corpus = load_corpus(args.dataset, cfg);
  const GraphStage stage =
      build_graph_stage(corpus.docs, cfg.graph_config(), cfg.sentence_split);
  save_vocab(stage.vocab, (fs::path(cfg.out_dir) / "vocab.txt").string());
  save_graph(stage.graph, (fs::path(cfg.out_dir) / "graph.txt").string());
  std::cout << "graph: " << stage.vocab.size() << " nodes, " << stage.graph.edge_count()
            << " edges -> " << cfg.out_dir << '\n';
  return 0;
}

int cmd_embed(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg = resolve_config(cmd, args);
  cfg.walk_params().validate();
  cfg.skipgram_params().validate();
  require_out(cfg);
  const WordGraph graph = load_graph(args.graph_path);
  const Vocabulary vocab = load_vocab(args.vocab_path);
  if (vocab.size() != graph.node_count())
    throw DimensionMismatchError("vocabulary and graph disagree on node count");
  SkipGramStats stats;
  const EmbeddingMatrix emb = embed_stage(graph, cfg, &stats);
  save_embedding(emb, vocab, (fs::path(cfg.out_dir) / "embeddings.txt").string());
  std::cout << "embeddings: " << emb.rows() << " x " << emb.dims() << " -> " << cfg.out_dir
            << '\n';
  for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e)
    std::cout << "epoch " << e << ": mean loss " << stats.epoch_mean_loss[e] << '\n';
  return 0;
}

int cmd_train(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg = resolve_config(cmd, args);
  cfg.validate();
  require_out(cfg);
  const Vocabulary vocab = load_vocab(args.vocab_path);
  auto [emb, tokens] = load_embedding(args.embeddings_path);
  if (tokens.size() != vocab.size())
    throw DimensionMismatchError("embedding file and vocabulary differ in size");
  const LabeledCorpus corpus = load_corpus(args.dataset, cfg);

  CnnHyperparams hp;
  hp.max_len = derive_max_len(corpus.docs, cfg);
  hp.dims = static_cast<int>(emb.dims());
  hp.filter_widths = cfg.filter_widths;
  hp.filters_per_width = cfg.n_filters;
  hp.dropout_p = cfg.dropout;
  hp.hidden_dim = cfg.hidden_dim;
  hp.n_classes = corpus.n_classes();
  hp.mode = cnn_mode_from_string(cfg.mode);

  LabeledCorpus train_part = corpus;
  LabeledCorpus valid_part;
  valid_part.class_names = corpus.class_names;
  if (cfg.valid_ratio > 0.0) {
    auto carve = split(corpus, 1.0 - cfg.valid_ratio, derive_seed(cfg.seed, "valid"));
    train_part = std::move(carve.train);
    valid_part = std::move(carve.test);
  }
  auto encode = [&](const LabeledCorpus& part) {
    std::vector<Document> docs;
    for (const LabeledDoc& d : part.docs)
      docs.push_back(encode_document(tokenize(d.text, d.doc_id), vocab, hp.max_len, d.label));
    return docs;
  };
  const auto train_docs = encode(train_part);
  const auto valid_docs = encode(valid_part);

  CnnModel model(hp, emb, vocab.fingerprint(), derive_seed(cfg.seed, "cnn-init"));
  CnnModel::TrainOptions opts;
  opts.epochs = cfg.cnn_epochs;
  opts.learning_rate = cfg.cnn_lr;
  opts.batch_size = cfg.batch_size;
  opts.seed = derive_seed(cfg.seed, "cnn-train");
  const TrainHistory history = model.train(train_docs, valid_docs, opts);

  save_model(model, (fs::path(cfg.out_dir) / "model.txt").string());
  for (std::size_t e = 0; e < history.train_loss.size(); ++e)
    std::cout << "epoch " << e << ": loss=" << history.train_loss[e]
              << " valid_acc=" << history.valid_accuracy[e] << '\n';
  std::cout << "model -> " << cfg.out_dir << '\n';
  return 0;
}

int cmd_eval(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg = resolve_config(cmd, args);
  const Vocabulary vocab = load_vocab(args.vocab_path);
  const CnnModel model = load_model(args.model_path, &vocab);
  const LabeledCorpus corpus = load_corpus(args.dataset, cfg);
  if (corpus.n_classes() != model.hyperparams().n_classes)
    throw DimensionMismatchError("dataset classes differ from the model");

  std::vector<int> preds, golds;
  for (const LabeledDoc& d : corpus.docs) {
    const Document doc = encode_document(tokenize(d.text, d.doc_id), vocab,
                                         model.hyperparams().max_len, d.label);
    preds.push_back(model.predict(doc).first);
    golds.push_back(d.label);
  }
  const EvalReport report = metrics(confusion(preds, golds, corpus.n_classes()));
  const std::string table = format_report(report, corpus.class_names);
  std::cout << table;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    std::ofstream(fs::path(cfg.out_dir) / "report.txt") << table;
    std::ofstream(fs::path(cfg.out_dir) / "report.json")
        << report_to_json(report, corpus.class_names);
    std::cout << "report -> " << cfg.out_dir << '\n';
  }
  return 0;
}

int cmd_predict(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg = resolve_config(cmd, args);
  const Vocabulary vocab = load_vocab(args.vocab_path);
  const CnnModel model = load_model(args.model_path, &vocab);

  std::vector<LabeledDoc> docs;
  if (!args.text.empty()) {
    docs.push_back({"stdin", -1, args.text});
  } else if (!args.dataset.empty()) {
    const LabeledCorpus corpus = load_corpus(args.dataset, cfg);
    docs = corpus.docs;
  } else {
    throw ConfigError("predict needs --text or --dataset");
  }

  for (const LabeledDoc& d : docs) {
    const Document doc = encode_document(tokenize(d.text, d.doc_id), vocab,
                                         model.hyperparams().max_len, -1);
    const auto [label, probs] = model.predict(doc);
    std::cout << d.doc_id << "\tlabel=" << label << "\tprobs=";
    for (std::size_t c = 0; c < probs.size(); ++c)
      std::cout << (c ? "," : "") << probs[c];
    std::cout << '\n';
  }
  return 0;
}

int cmd_run(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg = resolve_config(cmd, args);
  cfg.validate();
  const LabeledCorpus corpus = load_corpus(args.dataset, cfg);
  const RunResult result = run_pipeline(cfg, corpus, &std::cout);
  std::cout << result.report_text;
  return 0;
}

int cmd_sweep(const CLI::App* cmd, const CliArgs& args) {
  PipelineConfig cfg = resolve_config(cmd, args);
  cfg.validate();
  const LabeledCorpus corpus = load_corpus(args.dataset, cfg);

  std::vector<SweepCell> cells;
  if (args.sweep_type == "pq") {
    cells = sweep_pq(cfg, corpus, parse_double_list(args.p_values),
                     parse_double_list(args.q_values), &std::cout);
  } else if (args.sweep_type == "window") {
    cells = sweep_window(cfg, corpus, parse_int_list(args.windows), &std::cout);
  } else if (args.sweep_type == "graph-kind") {
    cells = sweep_graph_kind(cfg, corpus, &std::cout);
  } else {
    throw ConfigError("unknown sweep type '" + args.sweep_type +
                      "' (expected pq|window|graph-kind)");
  }
  const std::string table = format_sweep_table(cells);
  std::cout << table;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    std::ofstream(fs::path(cfg.out_dir) / "sweep.txt") << table;
    std::cout << "sweep table -> " << cfg.out_dir << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word-graph embeddings + convolutional sentiment classification"};
  app.require_subcommand(1);
  CliArgs args;

  CLI::App* graph = app.add_subcommand("graph", "build vocabulary and co-occurrence graph");
  graph->add_option("--dataset", args.dataset, "labeled csv/tsv file")->required();
  add_common_flags(graph, args);

  CLI::App* embed = app.add_subcommand("embed", "learn node embeddings from a graph");
  embed->add_option("--graph", args.graph_path, "graph file")->required();
  embed->add_option("--vocab", args.vocab_path, "vocabulary file")->required();
  add_common_flags(embed, args);

  CLI::App* train = app.add_subcommand("train", "train the CNN classifier");
  train->add_option("--dataset", args.dataset, "training csv/tsv file")->required();
  train->add_option("--vocab", args.vocab_path, "vocabulary file")->required();
  train->add_option("--embeddings", args.embeddings_path, "embedding file")->required();
  add_common_flags(train, args);

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a model on a labeled dataset");
  eval_cmd->add_option("--dataset", args.dataset, "labeled csv/tsv file")->required();
  eval_cmd->add_option("--vocab", args.vocab_path, "vocabulary file")->required();
  eval_cmd->add_option("--model", args.model_path, "model file")->required();
  add_common_flags(eval_cmd, args);

  CLI::App* predict = app.add_subcommand("predict", "classify raw text");
  predict->add_option("--vocab", args.vocab_path, "vocabulary file")->required();
  predict->add_option("--model", args.model_path, "model file")->required();
  predict->add_option("--text", args.text, "one document to classify");
  predict->add_option("--dataset", args.dataset, "csv/tsv file to classify");
  add_common_flags(predict, args);

  CLI::App* run = app.add_subcommand("run", "end-to-end: graph, embed, train, evaluate");
  run->add_option("--dataset", args.dataset, "labeled csv/tsv file")->required();
  add_common_flags(run, args);

  CLI::App* sweep = app.add_subcommand("sweep", "sensitivity sweeps over p/q, window, graph kind");
  sweep->add_option("--dataset", args.dataset, "labeled csv/tsv file")->required();
  sweep->add_option("--type", args.sweep_type, "pq|window|graph-kind");
  sweep->add_option("--p-values", args.p_values, "comma-separated p list");
  sweep->add_option("--q-values", args.q_values, "comma-separated q list");
  sweep->add_option("--windows", args.windows, "comma-separated window list");
  add_common_flags(sweep, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? 0 : 1;
  }

  try {
    if (graph->parsed()) return cmd_graph(graph, args);
    if (embed->parsed()) return cmd_embed(embed, args);
    if (train->parsed()) return cmd_train(train, args);
    if (eval_cmd->parsed()) return cmd_eval(eval_cmd, args);
    if (predict->parsed()) return cmd_predict(predict, args);
    if (run->parsed()) return cmd_run(run, args);
    if (sweep->parsed()) return cmd_sweep(sweep, args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
