#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "graphsent/errors.hpp"

namespace graphsent {

/// counts[gold][pred]
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int n_classes);

  void add(int gold, int pred);
  std::int64_t at(int gold, int pred) const {
    return counts_[index(gold, pred)];
  }
  int n_classes() const { return n_classes_; }
  std::int64_t total() const;
  std::int64_t trace() const;

 private:
  std::size_t index(int gold, int pred) const;
  int n_classes_;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> golds,
                          int n_classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Per-class one-vs-rest metrics plus overall accuracy and macro-F1.
/// Divisions by zero yield 0 by convention.
struct EvalReport {
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

EvalReport metrics(const ConfusionMatrix& cm);

/// Aligned plain-text table: one row per class, then accuracy and macro-F1.
std::string format_report(const EvalReport& report, std::span<const std::string> class_names);
/// Machine-readable JSON document with the same content.
std::string report_to_json(const EvalReport& report, std::span<const std::string> class_names);

}  // namespace graphsent
