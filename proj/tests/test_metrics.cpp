#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphsent/metrics.hpp"
#include "graphsent/rng.hpp"

using namespace graphsent;

TEST_CASE("confusion tallies gold/pred pairs exactly") {
  const std::vector<int> preds{1, 1, 0};
  const std::vector<int> golds{1, 0, 0};
  const auto cm = confusion(preds, golds, 2);
  CHECK(cm.at(1, 1) == 1);
  CHECK(cm.at(0, 1) == 1);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(1, 0) == 0);
  CHECK(cm.total() == 3);
}

TEST_CASE("perfect predictions give a diagonal matrix") {
  const std::vector<int> labels{0, 1, 2, 1, 0, 2, 2};
  const auto cm = confusion(labels, labels, 3);
  for (int g = 0; g < 3; ++g)
    for (int p = 0; p < 3; ++p) CHECK(cm.at(g, p) == (g == p ? cm.at(g, g) : 0));
  CHECK(cm.trace() == 7);
}

TEST_CASE("confusion error paths") {
  const std::vector<int> a{0, 1}, b{0};
  CHECK_THROWS_AS(confusion(a, b, 2), LengthMismatchError);
  const std::vector<int> bad{0, 2};
  CHECK_THROWS_AS(confusion(bad, a, 2), LabelOutOfRangeError);

  const std::vector<int> none;
  const auto empty = confusion(none, none, 2);
  CHECK(empty.total() == 0);
  CHECK_THROWS_AS(metrics(empty), EmptyMatrixError);
}

TEST_CASE("metrics match the worked examples") {
  SUBCASE("binary counts TP=85 TN=80 FP=15 FN=20") {
    ConfusionMatrix cm(2);
    for (int i = 0; i < 85; ++i) cm.add(1, 1);  // TP for class 1
    for (int i = 0; i < 80; ++i) cm.add(0, 0);  // TN
    for (int i = 0; i < 15; ++i) cm.add(0, 1);  // FP
    for (int i = 0; i < 20; ++i) cm.add(1, 0);  // FN
    const auto r = metrics(cm);
    CHECK(r.accuracy == doctest::Approx(0.825).epsilon(1e-12));
    CHECK(r.per_class[1].precision == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(r.per_class[1].recall == doctest::Approx(85.0 / 105.0).epsilon(1e-12));
  }
  SUBCASE("precision 1 and recall 1 give F1 1") {
    ConfusionMatrix cm(2);
    cm.add(0, 0);
    cm.add(1, 1);
    const auto r = metrics(cm);
    CHECK(r.per_class[0].f1 == 1.0);
    CHECK(r.per_class[1].f1 == 1.0);
    CHECK(r.macro_f1 == 1.0);
  }
  SUBCASE("preds [1,1,0] vs golds [1,0,0]") {
    const std::vector<int> preds{1, 1, 0};
    const std::vector<int> golds{1, 0, 0};
    const auto r = metrics(confusion(preds, golds, 2));
    CHECK(r.per_class[1].precision == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.per_class[1].recall == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.per_class[1].f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("metrics equal brute force over every small binary matrix") {
  // Exhaustive: all binary confusion matrices with total count <= 5.
  for (int tp = 0; tp <= 5; ++tp) {
    for (int tn = 0; tn + tp <= 5; ++tn) {
      for (int fp = 0; fp + tn + tp <= 5; ++fp) {
        for (int fn = 0; fn + fp + tn + tp <= 5; ++fn) {
          const int total = tp + tn + fp + fn;
          if (total == 0) continue;
          ConfusionMatrix cm(2);
          for (int i = 0; i < tp; ++i) cm.add(1, 1);
          for (int i = 0; i < tn; ++i) cm.add(0, 0);
          for (int i = 0; i < fp; ++i) cm.add(0, 1);
          for (int i = 0; i < fn; ++i) cm.add(1, 0);
          const auto r = metrics(cm);

          // Independent brute-force formulas, 0/0 -> 0 by convention.
          auto safe = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
          const double accuracy = safe(tp + tn, total);
          const double p1 = safe(tp, tp + fp);
          const double r1 = safe(tp, tp + fn);
          const double f1 = safe(2.0 * p1 * r1, p1 + r1);
          const double p0 = safe(tn, tn + fn);
          const double r0 = safe(tn, tn + fp);
          const double f0 = safe(2.0 * p0 * r0, p0 + r0);

          CHECK(r.accuracy == accuracy);
          CHECK(r.per_class[1].precision == p1);
          CHECK(r.per_class[1].recall == r1);
          CHECK(r.per_class[1].f1 == f1);
          CHECK(r.per_class[0].precision == p0);
          CHECK(r.per_class[0].recall == r0);
          CHECK(r.per_class[0].f1 == f0);
          CHECK(r.macro_f1 == (f0 + f1) / 2.0);
        }
      }
    }
  }
}

TEST_CASE("accuracy equals trace over total for any class count") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n_classes = 2 + static_cast<int>(rng.next_below(4));
    const int n = 1 + static_cast<int>(rng.next_below(50));
    std::vector<int> preds(static_cast<std::size_t>(n)), golds(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      preds[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_classes)));
      golds[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_classes)));
    }
    const auto cm = confusion(preds, golds, n_classes);
    CHECK(metrics(cm).accuracy ==
          static_cast<double>(cm.trace()) / static_cast<double>(cm.total()));
  }
}

TEST_CASE("consistent label permutation permutes per-class metrics") {
  Rng rng(6);
  const int n_classes = 3;
  std::vector<int> preds, golds;
  for (int i = 0; i < 60; ++i) {
    preds.push_back(static_cast<int>(rng.next_below(n_classes)));
    golds.push_back(static_cast<int>(rng.next_below(n_classes)));
  }
  const auto base = metrics(confusion(preds, golds, n_classes));

  const int perm[3] = {2, 0, 1};
  std::vector<int> preds2, golds2;
  for (int p : preds) preds2.push_back(perm[p]);
  for (int g : golds) golds2.push_back(perm[g]);
  const auto permuted = metrics(confusion(preds2, golds2, n_classes));

  CHECK(permuted.accuracy == base.accuracy);
  CHECK(permuted.macro_f1 == doctest::Approx(base.macro_f1).epsilon(1e-15));
  for (int c = 0; c < n_classes; ++c) {
    CHECK(permuted.per_class[static_cast<std::size_t>(perm[c])].precision ==
          base.per_class[static_cast<std::size_t>(c)].precision);
    CHECK(permuted.per_class[static_cast<std::size_t>(perm[c])].recall ==
          base.per_class[static_cast<std::size_t>(c)].recall);
    CHECK(permuted.per_class[static_cast<std::size_t>(perm[c])].f1 ==
          base.per_class[static_cast<std::size_t>(c)].f1);
  }
}

TEST_CASE("report serialization carries every metric") {
  const std::vector<int> preds{1, 1, 0, 0, 1};
  const std::vector<int> golds{1, 0, 0, 1, 1};
  const auto report = metrics(confusion(preds, golds, 2));
  const std::vector<std::string> names{"negative", "positive"};

  const std::string table = format_report(report, names);
  CHECK(table.find("negative") != std::string::npos);
  CHECK(table.find("accuracy") != std::string::npos);
  CHECK(table.find("macro_f1") != std::string::npos);

  const auto j = nlohmann::json::parse(report_to_json(report, names));
  CHECK(j["accuracy"].get<double>() == report.accuracy);
  CHECK(j["classes"].size() == 2);
  CHECK(j["classes"][0]["name"] == "negative");
  CHECK(j["classes"][1]["f1"].get<double>() == report.per_class[1].f1);
}
