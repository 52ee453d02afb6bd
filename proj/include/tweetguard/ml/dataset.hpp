#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetguard/error.hpp"

namespace tweetguard::ml {

inline constexpr int kSafe = 0;
inline constexpr int kPhishing = 1;

// Row-major design matrix with binary labels (1 = phishing).
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<double> x;
  std::vector<std::uint8_t> y;

  std::size_t dim() const { return feature_names.size(); }
  std::size_t size() const { return y.size(); }

  std::span<const double> row(std::size_t i) const { return {x.data() + i * dim(), dim()}; }
  double at(std::size_t i, std::size_t j) const { return x[i * dim() + j]; }

  void add(std::span<const double> values, int label) {
    require(values.size() == dim(), "row width does not match dataset dimension");
    require(label == kSafe || label == kPhishing, "label must be 0 or 1");
    x.insert(x.end(), values.begin(), values.end());
    y.push_back(static_cast<std::uint8_t>(label));
  }

  std::size_t count(int label) const {
    std::size_t n = 0;
    for (auto v : y) n += v == label ? 1 : 0;
    return n;
  }

  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.x.reserve(rows.size() * dim());
    out.y.reserve(rows.size());
    for (std::size_t r : rows) {
      const auto src = row(r);
      out.x.insert(out.x.end(), src.begin(), src.end());
      out.y.push_back(y[r]);
    }
    return out;
  }

  // Keeps columns [first, last).
  Dataset columns(std::size_t first, std::size_t last) const {
    require(first < last && last <= dim(), "column range out of bounds");
    Dataset out;
    out.feature_names.assign(feature_names.begin() + first, feature_names.begin() + last);
    out.x.reserve(size() * (last - first));
    for (std::size_t i = 0; i < size(); ++i) {
      const auto src = row(i);
      out.x.insert(out.x.end(), src.begin() + first, src.begin() + last);
    }
    out.y = y;
    return out;
  }

  void check() const {
    require(x.size() == y.size() * dim(), "dataset shape is inconsistent");
  }

  bool operator==(const Dataset&) const = default;
};

struct ClassWeights {
  double phishing = 1.0;
  double safe = 1.0;

  double of(int label) const { return label == kPhishing ? phishing : safe; }
  bool operator==(const ClassWeights&) const = default;
};

// w_c = n / (2 n_c).
inline ClassWeights class_weights_balanced(std::span<const std::uint8_t> y) {
  std::size_t n_phish = 0;
  for (auto v : y) n_phish += v == kPhishing ? 1 : 0;
  const std::size_t n_safe = y.size() - n_phish;
  if (n_phish == 0 || n_safe == 0) {
    throw Error(ErrorCode::kTraining, "balanced class weights need both classes present");
  }
  const double n = static_cast<double>(y.size());
  return {n / (2.0 * static_cast<double>(n_phish)), n / (2.0 * static_cast<double>(n_safe))};
}

}  // namespace tweetguard::ml
