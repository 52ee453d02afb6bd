#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "json.hpp"
#include "tweetguard/ml/dataset.hpp"

namespace tweetguard::ml {

inline constexpr double kVarianceFloor = 1e-9;
inline constexpr double kSentinel = -1.0;

// Gaussian naive Bayes. Sentinel values are left out of the per-class
// estimates and contribute a likelihood of 1 at prediction time.
struct NaiveBayesModel {
  std::array<double, 2> priors{};          // indexed by label, sum to 1
  std::array<std::vector<double>, 2> mean;  // [label][feature]
  std::array<std::vector<double>, 2> var;
  std::array<std::vector<std::uint8_t>, 2> has_stats;

  std::size_t dim() const { return mean[0].size(); }

  // Posterior probability of the phishing class.
  double score(std::span<const double> x) const {
    double log_joint[2];
    for (int c = 0; c < 2; ++c) log_joint[c] = std::log(priors[c]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == kSentinel || !has_stats[0][j] || !has_stats[1][j]) continue;
      for (int c = 0; c < 2; ++c) {
        const double d = x[j] - mean[c][j];
        log_joint[c] += -0.5 * std::log(2.0 * std::numbers::pi * var[c][j]) - d * d / (2.0 * var[c][j]);
      }
    }
    // P(phish) = 1 / (1 + exp(l_safe - l_phish)), written to stay finite.
    const double diff = log_joint[kSafe] - log_joint[kPhishing];
    if (diff > 0) {
      const double e = std::exp(-diff);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(diff));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["priors"] = {priors[0], priors[1]};
    for (int c = 0; c < 2; ++c) {
      const char* key = c == kPhishing ? "phishing" : "safe";
      j["classes"][key] = {{"mean", mean[c]}, {"variance", var[c]}, {"has_stats", has_stats[c]}};
    }
    return j;
  }

  static NaiveBayesModel from_json(const nlohmann::json& j, std::size_t dim) {
    NaiveBayesModel m;
    const auto priors = j.at("priors").get<std::vector<double>>();
    require(priors.size() == 2 && priors[0] > 0 && priors[1] > 0, "naive Bayes priors must be two positive values");
    m.priors = {priors[0], priors[1]};
    for (int c = 0; c < 2; ++c) {
      const auto& cls = j.at("classes").at(c == kPhishing ? "phishing" : "safe");
      m.mean[c] = cls.at("mean").get<std::vector<double>>();
      m.var[c] = cls.at("variance").get<std::vector<double>>();
      m.has_stats[c] = cls.at("has_stats").get<std::vector<std::uint8_t>>();
      require(m.mean[c].size() == dim && m.var[c].size() == dim && m.has_stats[c].size() == dim,
              "naive Bayes parameter width does not match feature count");
      for (double v : m.var[c]) require(v >= kVarianceFloor, "naive Bayes variance below floor");
    }
    return m;
  }

  bool operator==(const NaiveBayesModel&) const = default;
};

inline NaiveBayesModel train_naive_bayes(const Dataset& data, const ClassWeights& weights) {
  data.check();
  const std::size_t d = data.dim();
  std::array<std::size_t, 2> n_class{};
  for (auto v : data.y) ++n_class[v];
  if (n_class[0] == 0 || n_class[1] == 0) {
    throw Error(ErrorCode::kTraining, "naive Bayes needs both classes in the training data");
  }
  NaiveBayesModel m;
  const double w0 = weights.safe * static_cast<double>(n_class[0]);
  const double w1 = weights.phishing * static_cast<double>(n_class[1]);
  m.priors = {w0 / (w0 + w1), w1 / (w0 + w1)};

  for (int c = 0; c < 2; ++c) {
    m.mean[c].assign(d, 0.0);
    m.var[c].assign(d, kVarianceFloor);
    m.has_stats[c].assign(d, 0);
    std::vector<std::size_t> count(d, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.y[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double v = data.at(i, j);
        if (v == kSentinel) continue;
        ++count[j];
        m.mean[c][j] += v;
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (count[j] > 0) m.mean[c][j] /= static_cast<double>(count[j]);
    }
    std::vector<double> ss(d, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.y[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double v = data.at(i, j);
        if (v == kSentinel) continue;
        const double dv = v - m.mean[c][j];
        ss[j] += dv * dv;
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (count[j] == 0) continue;
      m.has_stats[c][j] = 1;
      m.var[c][j] = std::max(kVarianceFloor, ss[j] / static_cast<double>(count[j]));
    }
  }
  return m;
}

}  // namespace tweetguard::ml
