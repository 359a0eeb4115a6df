#include "graphsent/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "graphsent/rng.hpp"

namespace graphsent {

FileFormat format_from_string(const std::string& s) {
  if (s == "csv") return FileFormat::Csv;
  if (s == "tsv") return FileFormat::Tsv;
  throw ConfigError("unknown dataset format '" + s + "' (expected csv|tsv)");
}

namespace {

struct RawRow {
  std::vector<std::string> fields;
  std::size_t line_no = 0;
};

// RFC-4180-style parse: quoted fields may contain the delimiter, doubled
// quotes and embedded newlines. Rows are attributed to the line they start on.
std::vector<RawRow> parse_delimited(const std::string& content, char delim) {
  std::vector<RawRow> rows;
  RawRow row;
  row.line_no = 1;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    if (row_started || !row.fields.empty()) {
      end_field();
      rows.push_back(std::move(row));
    }
    row = RawRow{};
    row.line_no = line;
    row_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (c == '\n') ++line;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      row_started = true;
    } else if (c == delim) {
      end_field();
      row_started = true;
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
      row.line_no = line;
    } else {
      field.push_back(c);
      row_started = true;
    }
  }
  if (row_started || !field.empty() || !row.fields.empty()) end_row();
  return rows;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_header_label(const std::string& label) {
  const std::string l = lower(label);
  return l == "label" || l == "class" || l == "sentiment" || l == "polarity";
}

bool all_nonneg_integers(const std::vector<std::string>& labels) {
  for (const std::string& l : labels) {
    if (l.empty()) return false;
    for (char c : l)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

LoadedDataset load_dataset(const std::string& path, const LoadOptions& options) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileNotFoundError("cannot open dataset '" + path + "'");
  std::ostringstream buffer;
  buffer << is.rdbuf();

  const char delim = options.format == FileFormat::Csv ? ',' : '\t';
  std::vector<RawRow> rows = parse_delimited(buffer.str(), delim);

  LoadedDataset result;
  auto reject = [&](const RawRow& row, const std::string& why) {
    const std::string msg = "line " + std::to_string(row.line_no) + ": " + why;
    if (options.strict) throw ParseError("dataset '" + path + "' " + msg);
    result.warnings.push_back(msg);
  };

  std::vector<std::pair<std::string, std::string>> parsed;  // (label, text)
  std::vector<std::size_t> parsed_lines;
  bool first_data_row = true;
  for (const RawRow& row : rows) {
    if (row.fields.size() == 1 && trim(row.fields[0]).empty()) continue;  // blank line
    if (first_data_row && !row.fields.empty() && is_header_label(trim(row.fields[0]))) {
      first_data_row = false;
      continue;  // header
    }
    first_data_row = false;
    if (row.fields.size() != 2) {
      reject(row, "expected 2 columns, found " + std::to_string(row.fields.size()));
      continue;
    }
    const std::string label = trim(row.fields[0]);
    const std::string& text = row.fields[1];
    if (label.empty()) {
      reject(row, "empty label");
      continue;
    }
    if (trim(text).empty()) {
      reject(row, "empty text");
      continue;
    }
    if (!options.expected_labels.empty() &&
        std::find(options.expected_labels.begin(), options.expected_labels.end(), label) ==
            options.expected_labels.end()) {
      if (options.strict)
        throw UnknownLabelError("dataset '" + path + "' line " +
                                std::to_string(row.line_no) + ": unknown label '" + label +
                                "'");
      result.warnings.push_back("line " + std::to_string(row.line_no) +
                                ": unknown label '" + label + "'");
      continue;
    }
    parsed.emplace_back(label, text);
    parsed_lines.push_back(row.line_no);
  }
  if (parsed.empty()) throw NoValidRowsError("dataset '" + path + "' has no valid rows");

  // Class name ordering: explicit list > ascending numeric > lexicographic.
  std::vector<std::string> names;
  if (!options.expected_labels.empty()) {
    names = options.expected_labels;
  } else {
    std::vector<std::string> distinct;
    for (const auto& [label, text] : parsed)
      if (std::find(distinct.begin(), distinct.end(), label) == distinct.end())
        distinct.push_back(label);
    if (all_nonneg_integers(distinct)) {
      std::sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
        return std::stoll(a) < std::stoll(b);
      });
    } else {
      std::sort(distinct.begin(), distinct.end());
    }
    names = distinct;
  }

  std::map<std::string, int> class_index;
  for (std::size_t c = 0; c < names.size(); ++c)
    class_index[names[c]] = static_cast<int>(c);

  // Plain {0,1} polarity labels get readable names; indices are unchanged.
  if (names.size() == 2 && names[0] == "0" && names[1] == "1")
    result.corpus.class_names = {"negative", "positive"};
  else
    result.corpus.class_names = names;

  for (std::size_t i = 0; i < parsed.size(); ++i) {
    LabeledDoc doc;
    doc.doc_id = "line" + std::to_string(parsed_lines[i]);
    doc.label = class_index.at(parsed[i].first);
    doc.text = parsed[i].second;
    result.corpus.docs.push_back(std::move(doc));
  }
  return result;
}

SplitResult split(const LabeledCorpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0, 1)");
  const int n_classes = corpus.n_classes();
  if (n_classes < 1) throw EmptyDatasetError("corpus has no classes");

  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    const int label = corpus.docs[i].label;
    if (label < 0 || label >= n_classes)
      throw LabelOutOfRangeError("document label outside class range");
    by_class[static_cast<std::size_t>(label)].push_back(i);
  }
  for (int c = 0; c < n_classes; ++c) {
    if (by_class[static_cast<std::size_t>(c)].size() < 2)
      throw ClassTooSmallError("class '" + corpus.class_names[static_cast<std::size_t>(c)] +
                               "' has fewer than 2 documents");
  }

  SplitResult result;
  result.train.class_names = corpus.class_names;
  result.test.class_names = corpus.class_names;

  for (int c = 0; c < n_classes; ++c) {
    auto& ids = by_class[static_cast<std::size_t>(c)];
    Rng rng(mix_seed(derive_seed(seed, "split"), static_cast<std::uint64_t>(c)));
    for (std::size_t i = ids.size(); i > 1; --i)
      std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.next_below(i))]);

    const auto n = static_cast<std::int64_t>(ids.size());
    std::int64_t take = std::llround(ratio * static_cast<double>(n));
    take = std::clamp<std::int64_t>(take, 1, n - 1);  // both sides non-empty
    for (std::int64_t i = 0; i < n; ++i) {
      (i < take ? result.train_indices : result.test_indices).push_back(ids[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(result.train_indices.begin(), result.train_indices.end());
  std::sort(result.test_indices.begin(), result.test_indices.end());
  for (std::size_t i : result.train_indices) result.train.docs.push_back(corpus.docs[i]);
  for (std::size_t i : result.test_indices) result.test.docs.push_back(corpus.docs[i]);
  return result;
}

}  // namespace graphsent
