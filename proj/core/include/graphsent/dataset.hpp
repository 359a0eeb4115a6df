#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphsent/errors.hpp"

namespace graphsent {

struct LabeledDoc {
  std::string doc_id;
  int label = -1;
  std::string text;
};

struct LabeledCorpus {
  std::vector<LabeledDoc> docs;
  std::vector<std::string> class_names;

  int n_classes() const { return static_cast<int>(class_names.size()); }
};

enum class FileFormat { Csv, Tsv };
FileFormat format_from_string(const std::string& s);

struct LoadOptions {
  FileFormat format = FileFormat::Csv;
  bool strict = false;  // strict: malformed rows and unknown labels are errors
  // When non-empty, rows must carry one of these labels (order defines class
  // ids). When empty, classes are inferred from the data.
  std::vector<std::string> expected_labels;
};

struct LoadedDataset {
  LabeledCorpus corpus;
  std::vector<std::string> warnings;  // skipped rows with line numbers
};

/// Two-column file: label, text. Quoted fields may embed the delimiter,
/// doubled quotes and newlines. A leading header row (label/class/sentiment/
/// polarity) is skipped. Bare numeric binary labels {0,1} map to class names
/// negative/positive; other label sets keep their own names, numerically or
/// lexicographically ordered.
LoadedDataset load_dataset(const std::string& path, const LoadOptions& options = {});

struct SplitResult {
  LabeledCorpus train;
  LabeledCorpus test;
  std::vector<std::size_t> train_indices;  // into the input corpus
  std::vector<std::size_t> test_indices;
};

/// Stratified holdout split: per class, a seeded shuffle puts round(ratio * n)
/// documents in train (clamped so both sides stay non-empty). Disjoint,
/// exhaustive and deterministic under the seed.
SplitResult split(const LabeledCorpus& corpus, double ratio, std::uint64_t seed);

}  // namespace graphsent
