#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"
#include "tweetguard/corpus.hpp"
#include "tweetguard/features.hpp"
#include "tweetguard/ml/dataset.hpp"
#include "tweetguard/ml/decision_tree.hpp"
#include "tweetguard/ml/naive_bayes.hpp"
#include "tweetguard/ml/random_forest.hpp"
#include "tweetguard/time.hpp"
#include "tweetguard/whois.hpp"

namespace tweetguard::ml {

inline constexpr int kModelFormatVersion = 1;
inline constexpr double kDecisionThreshold = 0.5;

enum class Algorithm { kNaiveBayes, kDecisionTree, kRandomForest };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kNaiveBayes: return "naive_bayes";
    case Algorithm::kDecisionTree: return "decision_tree";
    case Algorithm::kRandomForest: return "random_forest";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view s) {
  const std::string v = text::ascii_lower(s);
  if (v == "nb" || v == "naive_bayes" || v == "naivebayes") return Algorithm::kNaiveBayes;
  if (v == "dt" || v == "decision_tree" || v == "decisiontree") return Algorithm::kDecisionTree;
  if (v == "rf" || v == "random_forest" || v == "randomforest") return Algorithm::kRandomForest;
  throw Error(ErrorCode::kBadRequest, "unknown algorithm '" + std::string(s) + "'");
}

enum class WeightMode { kBalanced, kUniform, kCustom };

struct TrainParams {
  Algorithm algorithm = Algorithm::kRandomForest;
  WeightMode weight_mode = WeightMode::kBalanced;
  ClassWeights custom_weights;
  int max_depth = -1;
  int min_samples_split = 2;
  int n_trees = 100;
  int max_features = -1;  // forest only; -1: ceil(sqrt(d))
  unsigned threads = 0;

  nlohmann::json to_json() const {
    nlohmann::json j = {{"weight_mode", weight_mode == WeightMode::kBalanced  ? "balanced"
                                        : weight_mode == WeightMode::kUniform ? "uniform"
                                                                              : "custom"},
                        {"max_depth", max_depth},
                        {"min_samples_split", min_samples_split}};
    if (weight_mode == WeightMode::kCustom) {
      j["custom_weights"] = {{"phishing", custom_weights.phishing}, {"safe", custom_weights.safe}};
    }
    if (algorithm == Algorithm::kRandomForest) {
      j["n_trees"] = n_trees;
      j["max_features"] = max_features;
    }
    return j;
  }
};

struct TrainingMeta {
  std::size_t n_samples = 0;
  std::size_t n_phishing = 0;
  Timestamp timestamp{};
  std::uint64_t rng_seed = 0;
  bool degenerate = false;

  bool operator==(const TrainingMeta&) const = default;
};

struct Prediction {
  LabelValue label = LabelValue::kSafe;
  double score = 0.0;
};

struct TrainedModel {
  int format_version = kModelFormatVersion;
  Algorithm algorithm = Algorithm::kRandomForest;
  std::vector<std::string> feature_names;
  ClassWeights class_weights;
  RegistrarTable registrar_freq_table;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::variant<NaiveBayesModel, DecisionTreeModel, RandomForestModel> parameters;
  TrainingMeta training_meta;
  double decision_threshold = kDecisionThreshold;

  std::size_t dim() const { return feature_names.size(); }

  double score(std::span<const double> x) const {
    if (x.size() != dim()) {
      throw Error(ErrorCode::kContract, "model expects " + std::to_string(dim()) +
                                            " features, got " + std::to_string(x.size()));
    }
    return std::visit([&](const auto& m) { return m.score(x); }, parameters);
  }

  bool operator==(const TrainedModel&) const = default;
};

inline Prediction predict(const TrainedModel& model, std::span<const double> x) {
  const double s = model.score(x);
  return {s >= model.decision_threshold ? LabelValue::kPhishing : LabelValue::kSafe, s};
}

inline Prediction predict(const TrainedModel& model, const FeatureVector& v) {
  return predict(model, std::span<const double>(v.values));
}

inline ClassWeights resolve_class_weights(const TrainParams& p, std::span<const std::uint8_t> y) {
  switch (p.weight_mode) {
    case WeightMode::kUniform: return {};
    case WeightMode::kCustom:
      require(p.custom_weights.phishing > 0 && p.custom_weights.safe > 0, "class weights must be positive");
      return p.custom_weights;
    case WeightMode::kBalanced: break;
  }
  std::size_t n_phish = 0;
  for (auto v : y) n_phish += v == kPhishing ? 1 : 0;
  // A single-class training set can only give a degenerate tree; weights
  // are irrelevant there.
  if (n_phish == 0 || n_phish == y.size()) return {};
  return class_weights_balanced(y);
}

inline TrainedModel train(const Dataset& data, const TrainParams& params, std::uint64_t rng_seed,
                          Timestamp timestamp = {}, RegistrarTable registrars = {}) {
  data.check();
  if (data.size() == 0) throw Error(ErrorCode::kTraining, "training set is empty");
  TrainedModel model;
  model.algorithm = params.algorithm;
  model.feature_names = data.feature_names;
  model.class_weights = resolve_class_weights(params, data.y);
  model.registrar_freq_table = std::move(registrars);
  model.hyperparameters = params.to_json();
  model.training_meta.n_samples = data.size();
  model.training_meta.n_phishing = data.count(kPhishing);
  model.training_meta.timestamp = timestamp;
  model.training_meta.rng_seed = rng_seed;

  switch (params.algorithm) {
    case Algorithm::kNaiveBayes:
      model.parameters = train_naive_bayes(data, model.class_weights);
      break;
    case Algorithm::kDecisionTree: {
      TreeParams tp{params.max_depth, params.min_samples_split, 0};
      auto tree = train_decision_tree(data, model.class_weights, tp, rng_seed);
      model.training_meta.degenerate = tree.degenerate;
      model.parameters = std::move(tree);
      break;
    }
    case Algorithm::kRandomForest: {
      ForestParams fp;
      fp.n_trees = params.n_trees;
      fp.max_depth = params.max_depth;
      fp.min_samples_split = params.min_samples_split;
      fp.max_features = params.max_features;
      fp.threads = params.threads;
      auto forest = train_random_forest(data, model.class_weights, fp, rng_seed);
      model.training_meta.degenerate =
          model.training_meta.n_phishing == 0 || model.training_meta.n_phishing == data.size();
      model.parameters = std::move(forest);
      break;
    }
  }
  return model;
}

inline nlohmann::json model_to_json(const TrainedModel& m) {
  nlohmann::json j;
  j["format_version"] = m.format_version;
  j["algorithm"] = to_string(m.algorithm);
  j["feature_names"] = m.feature_names;
  j["class_weights"] = {{"phishing", m.class_weights.phishing}, {"safe", m.class_weights.safe}};
  j["registrar_freq_table"] = m.registrar_freq_table.to_json();
  j["hyperparameters"] = m.hyperparameters;
  j["parameters"] = std::visit([](const auto& p) { return p.to_json(); }, m.parameters);
  j["training_meta"] = {{"n_samples", m.training_meta.n_samples},
                        {"n_phishing", m.training_meta.n_phishing},
                        {"timestamp", format_iso8601(m.training_meta.timestamp)},
                        {"rng_seed", m.training_meta.rng_seed},
                        {"degenerate", m.training_meta.degenerate}};
  j["decision_threshold"] = m.decision_threshold;
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_number_integer()) {
    throw Error(ErrorCode::kParse, "model file has no integer format_version");
  }
  const int version = j["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kVersion, "model format_version " + std::to_string(version) +
                                         " found, expected " + std::to_string(kModelFormatVersion));
  }
  try {
    TrainedModel m;
    m.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (m.feature_names.empty()) throw Error(ErrorCode::kParse, "model has no feature names");
    // Names must be canonical features in canonical order.
    long last = -1;
    for (const auto& name : m.feature_names) {
      const long idx = static_cast<long>(feature_index(name));
      if (idx <= last) throw Error(ErrorCode::kParse, "model feature_names are not in canonical order");
      last = idx;
    }
    const auto& cw = j.at("class_weights");
    m.class_weights = {cw.at("phishing").get<double>(), cw.at("safe").get<double>()};
    if (!(m.class_weights.phishing > 0 && m.class_weights.safe > 0)) {
      throw Error(ErrorCode::kParse, "class weights must be positive");
    }
    m.registrar_freq_table = RegistrarTable::from_json(j.at("registrar_freq_table"));
    m.hyperparameters = j.value("hyperparameters", nlohmann::json::object());
    const auto& p = j.at("parameters");
    switch (m.algorithm) {
      case Algorithm::kNaiveBayes: m.parameters = NaiveBayesModel::from_json(p, m.dim()); break;
      case Algorithm::kDecisionTree: m.parameters = DecisionTreeModel::from_json(p, m.dim()); break;
      case Algorithm::kRandomForest: m.parameters = RandomForestModel::from_json(p, m.dim()); break;
    }
    const auto& meta = j.at("training_meta");
    m.training_meta.n_samples = meta.at("n_samples").get<std::size_t>();
    m.training_meta.n_phishing = meta.at("n_phishing").get<std::size_t>();
    m.training_meta.timestamp = parse_iso8601_or_throw(meta.at("timestamp").get<std::string>(), "timestamp");
    m.training_meta.rng_seed = meta.at("rng_seed").get<std::uint64_t>();
    m.training_meta.degenerate = meta.value("degenerate", false);
    m.decision_threshold = j.value("decision_threshold", kDecisionThreshold);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kContract) throw Error(ErrorCode::kParse, e.what());
    throw;
  }
}

inline void save_model(const TrainedModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model file " + path.string());
  out << model_to_json(m).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing model file " + path.string());
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read model file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace tweetguard::ml
