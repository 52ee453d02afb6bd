#pragma once

#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tweetguard/features.hpp"
#include "tweetguard/ml/model.hpp"

namespace tweetguard {

// Phishing is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fn + fp + tn; }

  void record(bool actual_phishing, bool predicted_phishing) {
    if (actual_phishing) {
      ++(predicted_phishing ? tp : fn);
    } else {
      ++(predicted_phishing ? fp : tn);
    }
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fn += o.fn;
    fp += o.fp;
    tn += o.tn;
    return *this;
  }

  nlohmann::json to_json() const { return {{"tp", tp}, {"fn", fn}, {"fp", fp}, {"tn", tn}}; }

  bool operator==(const ConfusionMatrix&) const = default;
};

// Non-negative fraction kept in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rational of(std::uint64_t n, std::uint64_t d) {
    require(d != 0, "rational with zero denominator");
    const std::uint64_t g = std::gcd(n, d);
    return g == 0 ? Rational{0, 1} : Rational{n / g, d / g};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  bool operator==(const Rational&) const = default;
};

struct Metrics {
  Rational accuracy;
  std::optional<Rational> precision_phishing;
  std::optional<Rational> precision_safe;
  std::optional<Rational> recall_phishing;
  std::optional<Rational> recall_safe;

  bool operator==(const Metrics&) const = default;
};

namespace detail {
inline std::optional<Rational> ratio_or_undefined(std::uint64_t n, std::uint64_t d) {
  if (d == 0) return std::nullopt;
  return Rational::of(n, d);
}
}  // namespace detail

inline Metrics metrics(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorCode::kContract, "metrics of an empty confusion matrix");
  Metrics out;
  out.accuracy = Rational::of(m.tp + m.tn, m.total());
  out.precision_phishing = detail::ratio_or_undefined(m.tp, m.tp + m.fp);
  out.recall_phishing = detail::ratio_or_undefined(m.tp, m.tp + m.fn);
  out.precision_safe = detail::ratio_or_undefined(m.tn, m.tn + m.fn);
  out.recall_safe = detail::ratio_or_undefined(m.tn, m.tn + m.fp);
  return out;
}

inline nlohmann::json metric_json(const std::optional<Rational>& r) {
  if (!r) return nullptr;
  return {{"value", r->value()}, {"exact", r->str()}};
}

inline nlohmann::json metrics_to_json(const Metrics& m) {
  return {{"accuracy", metric_json(m.accuracy)},
          {"precision_phishing", metric_json(m.precision_phishing)},
          {"precision_safe", metric_json(m.precision_safe)},
          {"recall_phishing", metric_json(m.recall_phishing)},
          {"recall_safe", metric_json(m.recall_safe)}};
}

inline constexpr int kFolds = 5;

// Fold index per sample. Each class is shuffled separately, then samples are
// dealt round-robin with one counter running through both classes, so fold
// sizes differ by at most one and each fold is stratified to within one.
inline std::vector<int> stratified_folds(std::span<const std::uint8_t> y, int k, std::uint64_t seed) {
  require(k >= 2, "need at least two folds");
  std::vector<int> fold(y.size(), -1);
  Rng rng(derive_seed(seed, 0x5f01d));
  std::size_t counter = 0;
  for (int label : {ml::kPhishing, ml::kSafe}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) idx.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t i : idx) fold[i] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
  }
  return fold;
}

struct EvaluationReport {
  ml::Algorithm algorithm = ml::Algorithm::kRandomForest;
  std::vector<std::string> feature_names;
  ConfusionMatrix matrix;
  Metrics metrics;
  std::vector<ConfusionMatrix> per_fold;
  nlohmann::json hyperparameters;
  std::uint64_t rng_seed = 0;

  double accuracy() const { return metrics.accuracy.value(); }

  nlohmann::json to_json() const {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : per_fold) folds.push_back(f.to_json());
    return {{"algorithm", ml::to_string(algorithm)},
            {"n_features", feature_names.size()},
            {"matrix", matrix.to_json()},
            {"metrics", metrics_to_json(metrics)},
            {"per_fold", folds},
            {"hyperparameters", hyperparameters},
            {"rng_seed", rng_seed}};
  }
};

// Fold f trains with seed derive_seed(rng_seed, f + 1); class weights come
// from the training split only.
inline EvaluationReport cross_validate(const ml::Dataset& data, const ml::TrainParams& params,
                                       std::uint64_t rng_seed) {
  data.check();
  for (int label : {ml::kPhishing, ml::kSafe}) {
    const std::size_t n = data.count(label);
    if (n < static_cast<std::size_t>(kFolds)) {
      throw Error(ErrorCode::kTraining, std::string("class ") + (label == ml::kPhishing ? "phishing" : "safe") +
                                            " has " + std::to_string(n) +
                                            " samples; 5-fold cross-validation needs at least 5");
    }
  }
  const auto fold = stratified_folds(data.y, kFolds, rng_seed);
  EvaluationReport report;
  report.algorithm = params.algorithm;
  report.feature_names = data.feature_names;
  report.hyperparameters = params.to_json();
  report.rng_seed = rng_seed;
  for (int f = 0; f < kFolds; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
    const auto model = ml::train(data.subset(train_rows), params, derive_seed(rng_seed, static_cast<std::uint64_t>(f) + 1));
    ConfusionMatrix m;
    for (std::size_t i : test_rows) {
      m.record(data.y[i] == ml::kPhishing, ml::predict(model, data.row(i)).label == LabelValue::kPhishing);
    }
    report.per_fold.push_back(m);
    report.matrix += m;
  }
  report.metrics = metrics(report.matrix);
  return report;
}

inline const std::array<std::string_view, 4> kAblationRows = {"F1", "F1 + F2", "F1 + F2 + F3",
                                                              "F1 + F2 + F3 + F4"};

// Cross-validates on the leading 1, 2, 3 and 4 feature groups. Excluded
// groups are dropped from the vectors. All four runs share the same folds.
inline std::vector<EvaluationReport> ablate(const ml::Dataset& data, const ml::TrainParams& params,
                                            std::uint64_t rng_seed) {
  require(data.dim() == kFeatureCount, "ablation needs full 22-feature vectors");
  std::vector<EvaluationReport> out;
  for (int groups = 1; groups <= 4; ++groups) {
    out.push_back(cross_validate(data.columns(0, kGroupBounds[static_cast<std::size_t>(groups)]), params, rng_seed));
  }
  return out;
}

namespace detail {

inline std::string percent(const std::optional<Rational>& r) {
  if (!r) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * r->value());
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string algorithm_title(ml::Algorithm a) {
  switch (a) {
    case ml::Algorithm::kNaiveBayes: return "Naive Bayes";
    case ml::Algorithm::kDecisionTree: return "Decision Tree";
    case ml::Algorithm::kRandomForest: return "Random Forest";
  }
  return "?";
}

}  // namespace detail

// Metrics as rows, one column per report.
inline std::string format_results_table(const std::vector<EvaluationReport>& reports) {
  std::ostringstream out;
  const std::size_t first = 22, col = 16;
  out << detail::pad("Evaluation metric", first);
  for (const auto& r : reports) out << detail::pad(detail::algorithm_title(r.algorithm), col);
  out << '\n';
  auto row = [&](const char* name, auto get) {
    out << detail::pad(name, first);
    for (const auto& r : reports) out << detail::pad(detail::percent(get(r.metrics)), col);
    out << '\n';
  };
  row("Accuracy", [](const Metrics& m) { return std::optional<Rational>(m.accuracy); });
  row("Precision (phishing)", [](const Metrics& m) { return m.precision_phishing; });
  row("Precision (safe)", [](const Metrics& m) { return m.precision_safe; });
  row("Recall (phishing)", [](const Metrics& m) { return m.recall_phishing; });
  row("Recall (safe)", [](const Metrics& m) { return m.recall_safe; });
  return out.str();
}

// One row per feature-set run.
inline std::string format_ablation_table(const std::vector<EvaluationReport>& reports) {
  std::ostringstream out;
  const std::size_t first = 20, col = 22;
  out << detail::pad("Feature Sets", first);
  for (const char* h : {"Precision (Phishing)", "Precision (Safe)", "Recall (Phishing)", "Recall (Safe)",
                        "Accuracy"}) {
    out << detail::pad(h, col);
  }
  out << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& m = reports[i].metrics;
    out << detail::pad(i < kAblationRows.size() ? std::string(kAblationRows[i]) : std::to_string(i), first)
        << detail::pad(detail::percent(m.precision_phishing), col)
        << detail::pad(detail::percent(m.precision_safe), col)
        << detail::pad(detail::percent(m.recall_phishing), col)
        << detail::pad(detail::percent(m.recall_safe), col)
        << detail::pad(detail::percent(m.accuracy), col) << '\n';
  }
  return out.str();
}

inline std::string format_confusion_matrix(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << detail::pad("", 18) << detail::pad("Predicted phishing", 20) << "Predicted safe\n"
      << detail::pad("Actual phishing", 18) << detail::pad(std::to_string(m.tp), 20) << m.fn << '\n'
      << detail::pad("Actual safe", 18) << detail::pad(std::to_string(m.fp), 20) << m.tn << '\n';
  return out.str();
}

}  // namespace tweetguard
