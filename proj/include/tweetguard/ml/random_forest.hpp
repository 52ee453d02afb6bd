#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "json.hpp"
#include "tweetguard/ml/decision_tree.hpp"

namespace tweetguard::ml {

struct ForestParams {
  int n_trees = 100;
  int max_depth = -1;
  int min_samples_split = 2;
  int max_features = -1;  // -1: ceil(sqrt(d)); 0: all features
  bool bootstrap = true;
  unsigned threads = 0;   // 0: hardware concurrency
};

inline int resolve_max_features(int requested, std::size_t dim) {
  if (requested < 0) return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim))));
  return requested;
}

// Multiplicity of each row in a same-size sample drawn with replacement.
inline std::vector<std::uint32_t> bootstrap_counts(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint32_t> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(n)];
  return counts;
}

struct RandomForestModel {
  std::vector<DecisionTreeModel> trees;
  std::vector<std::uint64_t> seeds;  // per-tree seed, same order as trees

  // Fraction of trees voting phishing.
  double score(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& t : trees) votes += t.score(x) >= 0.5 ? 1 : 0;
    return static_cast<double>(votes) / static_cast<double>(trees.size());
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < trees.size(); ++i) {
      nlohmann::json t = trees[i].to_json();
      t["seed"] = seeds[i];
      arr.push_back(std::move(t));
    }
    return {{"trees", arr}};
  }

  static RandomForestModel from_json(const nlohmann::json& j, std::size_t dim) {
    RandomForestModel m;
    for (const auto& t : j.at("trees")) {
      m.trees.push_back(DecisionTreeModel::from_json(t, dim));
      m.seeds.push_back(t.at("seed").get<std::uint64_t>());
    }
    if (m.trees.empty()) throw Error(ErrorCode::kParse, "random forest has no trees");
    return m;
  }

  bool operator==(const RandomForestModel&) const = default;
};

// Tree t uses seed derive_seed(rng_seed, t) for its bootstrap and
// derive_seed(that, 1) for split-feature sampling, so the result does not
// depend on how trees are scheduled across threads.
inline RandomForestModel train_random_forest(const Dataset& data, const ClassWeights& weights,
                                             const ForestParams& params, std::uint64_t rng_seed) {
  data.check();
  require(params.n_trees >= 1, "n_trees must be at least 1");
  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_split = params.min_samples_split;
  tp.max_features = resolve_max_features(params.max_features, data.dim());

  const std::size_t n_trees = static_cast<std::size_t>(params.n_trees);
  RandomForestModel model;
  model.trees.resize(n_trees);
  model.seeds.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) model.seeds[t] = derive_seed(rng_seed, t);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    std::vector<double> w(data.size());
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_trees) return;
      try {
        const std::uint64_t seed = model.seeds[t];
        const auto count = params.bootstrap ? bootstrap_counts(data.size(), seed)
                                            : std::vector<std::uint32_t>(data.size(), 1);
        for (std::size_t i = 0; i < data.size(); ++i) w[i] = weights.of(data.y[i]) * count[i];
        model.trees[t] = train_tree_weighted(data, w, count, tp, derive_seed(seed, 1));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n_trees);
        return;
      }
    }
  };
  unsigned threads = params.threads != 0 ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_trees));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return model;
}

}  // namespace tweetguard::ml
