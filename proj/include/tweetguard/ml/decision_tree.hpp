#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "json.hpp"
#include "tweetguard/ml/dataset.hpp"
#include "tweetguard/rng.hpp"

namespace tweetguard::ml {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<double, 2> counts{};  // weighted class totals, indexed by label

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct TreeParams {
  int max_depth = -1;  // -1: unlimited
  int min_samples_split = 2;
  int max_features = 0;  // features tried per split; 0: all
};

// Two-class Gini impurity 1 - p0^2 - p1^2 of a weighted node.
inline double gini(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  const double p0 = w0 / w;
  const double p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // preorder; nodes[0] is the root
  bool degenerate = false;      // trained on a single class

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const TreeNode& n = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i];
  }

  // Weighted phishing fraction of the reached leaf.
  double score(std::span<const double> x) const {
    const TreeNode& leaf = leaf_for(x);
    const double total = leaf.counts[0] + leaf.counts[1];
    return total > 0.0 ? leaf.counts[kPhishing] / total : 0.0;
  }

  int depth() const {
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      best = std::max(best, d[i]);
      if (!nodes[i].is_leaf()) {
        d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
        d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
      }
    }
    return best;
  }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  // Structural checks: one root, every child index in range and referenced
  // exactly once, children after their parent (so no cycles).
  void validate(std::size_t dim) const {
    require(!nodes.empty(), "decision tree has no nodes");
    std::vector<int> parents(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const TreeNode& n = nodes[i];
      if (n.is_leaf()) {
        require(n.feature == -1 && n.left == -1 && n.right == -1, "leaf node has children");
        continue;
      }
      require(static_cast<std::size_t>(n.feature) < dim, "split feature index out of range");
      for (int child : {n.left, n.right}) {
        require(child > static_cast<int>(i) && static_cast<std::size_t>(child) < nodes.size(),
                "child index out of range");
        ++parents[static_cast<std::size_t>(child)];
      }
    }
    require(parents[0] == 0, "root node has a parent");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      require(parents[i] == 1, "tree node is not reachable exactly once");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes) {
      arr.push_back({{"feature_idx", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"leaf_counts", {n.counts[0], n.counts[1]}}});
    }
    return {{"nodes", arr}, {"degenerate", degenerate}};
  }

  static DecisionTreeModel from_json(const nlohmann::json& j, std::size_t dim) {
    DecisionTreeModel m;
    m.degenerate = j.value("degenerate", false);
    for (const auto& n : j.at("nodes")) {
      TreeNode node;
      node.feature = n.at("feature_idx").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
      const auto counts = n.at("leaf_counts").get<std::vector<double>>();
      require(counts.size() == 2, "leaf_counts must have two entries");
      node.counts = {counts[0], counts[1]};
      m.nodes.push_back(node);
    }
    m.validate(dim);
    return m;
  }

  bool operator==(const DecisionTreeModel&) const = default;
};

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::span<const double> weight, std::span<const std::uint32_t> count,
              const TreeParams& params, std::uint64_t seed)
      : data_(data), weight_(weight), count_(count), params_(params), rng_(seed), order_(data.dim()) {
    std::iota(order_.begin(), order_.end(), 0);
  }

  DecisionTreeModel build() {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (count_[i] > 0 && weight_[i] > 0.0) rows.push_back(i);
    }
    if (rows.empty()) throw Error(ErrorCode::kTraining, "decision tree needs at least one sample");
    DecisionTreeModel model;
    nodes_ = &model.nodes;
    grow(rows, 0);
    const TreeNode& root = model.nodes[0];
    model.degenerate = root.counts[0] == 0.0 || root.counts[1] == 0.0;
    return model;
  }

 private:
  static constexpr double kGainTolerance = 1e-12;

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  int grow(std::vector<std::size_t>& rows, int depth) {
    TreeNode node;
    std::uint64_t samples = 0;
    for (std::size_t r : rows) {
      node.counts[data_.y[r]] += weight_[r];
      samples += count_[r];
    }
    const int index = static_cast<int>(nodes_->size());
    nodes_->push_back(node);

    const bool pure = node.counts[0] == 0.0 || node.counts[1] == 0.0;
    const bool depth_cap = params_.max_depth >= 0 && depth >= params_.max_depth;
    if (pure || depth_cap || samples < static_cast<std::uint64_t>(params_.min_samples_split)) {
      return index;
    }
    const Split split = best_split(rows, node.counts);
    if (split.feature < 0) return index;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (data_.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int rr = grow(right, depth + 1);
    TreeNode& self = (*nodes_)[static_cast<std::size_t>(index)];
    self.feature = split.feature;
    self.threshold = split.threshold;
    self.left = l;
    self.right = rr;
    return index;
  }

  Split best_split(const std::vector<std::size_t>& rows, const std::array<double, 2>& totals) {
    const std::size_t d = data_.dim();
    const std::size_t k =
        params_.max_features > 0 ? std::min<std::size_t>(static_cast<std::size_t>(params_.max_features), d) : d;
    std::vector<std::size_t> first(order_.begin(), order_.end());
    std::vector<std::size_t> rest;
    if (k < d) {
      rng_.shuffle(std::span<std::size_t>(order_));
      first.assign(order_.begin(), order_.begin() + static_cast<long>(k));
      rest.assign(order_.begin() + static_cast<long>(k), order_.end());
      std::sort(first.begin(), first.end());
      std::sort(rest.begin(), rest.end());
    }
    Split best = scan(rows, totals, first);
    // If none of the sampled features separates the node, fall back to the
    // remaining ones rather than stopping early.
    if (best.feature < 0 && !rest.empty()) best = scan(rows, totals, rest);
    return best;
  }

  Split scan(const std::vector<std::size_t>& rows, const std::array<double, 2>& totals,
             const std::vector<std::size_t>& features) {
    Split best;
    const double w_total = totals[0] + totals[1];
    // Impurity terms are w0*w1/W (Gini * W / 2), normalized by the node weight
    // so that gains are unaffected by rescaling all weights.
    const double parent = totals[0] * totals[1] / w_total;
    std::vector<std::pair<double, std::size_t>> sorted(rows.size());
    for (std::size_t f : features) {
      for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {data_.at(rows[i], f), rows[i]};
      std::sort(sorted.begin(), sorted.end());
      std::array<double, 2> left{};
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left[data_.y[sorted[i].second]] += weight_[sorted[i].second];
        const double a = sorted[i].first;
        const double b = sorted[i + 1].first;
        if (!(a < b)) continue;
        const double wl = left[0] + left[1];
        const double r0 = totals[0] - left[0];
        const double r1 = totals[1] - left[1];
        const double wr = r0 + r1;
        if (wl <= 0.0 || wr <= 0.0) continue;
        const double children = left[0] * left[1] / wl + r0 * r1 / wr;
        const double gain = 2.0 * (parent - children) / w_total;
        if (gain > kGainTolerance && gain > best.gain + kGainTolerance) {
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best = {static_cast<int>(f), mid, gain};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  std::span<const double> weight_;
  std::span<const std::uint32_t> count_;
  TreeParams params_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::vector<TreeNode>* nodes_ = nullptr;
};

}  // namespace detail

// CART on weighted Gini. `weight` is the per-row training weight and `count`
// the per-row multiplicity (bootstrap draws); rows with count 0 are unused.
inline DecisionTreeModel train_tree_weighted(const Dataset& data, std::span<const double> weight,
                                             std::span<const std::uint32_t> count,
                                             const TreeParams& params, std::uint64_t seed) {
  data.check();
  require(weight.size() == data.size() && count.size() == data.size(), "weight/count length mismatch");
  require(params.min_samples_split >= 2, "min_samples_split must be at least 2");
  return detail::TreeBuilder(data, weight, count, params, seed).build();
}

inline DecisionTreeModel train_decision_tree(const Dataset& data, const ClassWeights& weights,
                                             const TreeParams& params = {}, std::uint64_t seed = 0) {
  std::vector<double> w(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) w[i] = weights.of(data.y[i]);
  const std::vector<std::uint32_t> count(data.size(), 1);
  return train_tree_weighted(data, w, count, params, seed);
}

}  // namespace tweetguard::ml
