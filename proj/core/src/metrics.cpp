#include "graphsent/metrics.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace graphsent {

ConfusionMatrix::ConfusionMatrix(int n_classes) : n_classes_(n_classes) {
  if (n_classes < 1) throw ConfigError("confusion matrix needs at least one class");
  counts_.assign(static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(n_classes),
                 0);
}

std::size_t ConfusionMatrix::index(int gold, int pred) const {
  if (gold < 0 || gold >= n_classes_ || pred < 0 || pred >= n_classes_)
    throw LabelOutOfRangeError("label outside [0, " + std::to_string(n_classes_) + ")");
  return static_cast<std::size_t>(gold) * static_cast<std::size_t>(n_classes_) +
         static_cast<std::size_t>(pred);
}

void ConfusionMatrix::add(int gold, int pred) { ++counts_[index(gold, pred)]; }

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int c = 0; c < n_classes_; ++c) t += at(c, c);
  return t;
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> golds,
                          int n_classes) {
  if (preds.size() != golds.size())
    throw LengthMismatchError("preds and golds have different lengths");
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) cm.add(golds[i], preds[i]);
  return cm;
}

namespace {
// 0/0 is defined as 0.
double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

EvalReport metrics(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw EmptyMatrixError("confusion matrix has no entries");

  EvalReport report;
  const int n = cm.n_classes();
  double f1_sum = 0.0;
  for (int c = 0; c < n; ++c) {
    std::int64_t tp = cm.at(c, c);
    std::int64_t fp = 0, fn = 0;
    for (int other = 0; other < n; ++other) {
      if (other == c) continue;
      fp += cm.at(other, c);
      fn += cm.at(c, other);
    }
    ClassMetrics m;
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    f1_sum += m.f1;
    report.per_class.push_back(m);
  }
  report.accuracy = ratio(cm.trace(), total);
  report.macro_f1 = f1_sum / static_cast<double>(n);
  return report;
}

std::string format_report(const EvalReport& report,
                          std::span<const std::string> class_names) {
  std::size_t name_width = 8;
  for (const std::string& n : class_names) name_width = std::max(name_width, n.size());

  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s %9s %9s %9s\n", static_cast<int>(name_width),
                "class", "precision", "recall", "f1");
  os << buf;
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const std::string name =
        c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
    const ClassMetrics& m = report.per_class[c];
    std::snprintf(buf, sizeof(buf), "%-*s %9.4f %9.4f %9.4f\n",
                  static_cast<int>(name_width), name.c_str(), m.precision, m.recall, m.f1);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-*s %9.4f\n", static_cast<int>(name_width), "accuracy",
                report.accuracy);
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-*s %9.4f\n", static_cast<int>(name_width), "macro_f1",
                report.macro_f1);
  os << buf;
  return os.str();
}

std::string report_to_json(const EvalReport& report,
                           std::span<const std::string> class_names) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["macro_f1"] = report.macro_f1;
  j["classes"] = nlohmann::json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    j["classes"].push_back({
        {"name", c < class_names.size() ? class_names[c] : "class" + std::to_string(c)},
        {"precision", m.precision},
        {"recall", m.recall},
        {"f1", m.f1},
    });
  }
  return j.dump(2) + "\n";
}

}  // namespace graphsent
