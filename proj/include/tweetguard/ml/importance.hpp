#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

#include "tweetguard/ml/model.hpp"

namespace tweetguard::ml {

// kModel scores the model as a whole. kPerMember averages the error of each
// ensemble member (each tree of a forest) and equals kModel for single
// models; it keeps redundant ensembles from masking weak features.
enum class ImportanceScope { kModel, kPerMember };

struct FeatureImportance {
  std::string feature;
  std::size_t index = 0;
  double importance = 0.0;
};

using Permutation = std::function<std::vector<std::size_t>(std::size_t n, std::uint64_t seed)>;

inline std::vector<std::size_t> shuffled_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(p));
  return p;
}

namespace detail {

inline double member_error(const TrainedModel& model, ImportanceScope scope, const std::vector<double>& x,
                           std::span<const std::uint8_t> y, std::size_t dim) {
  const auto* forest = std::get_if<RandomForestModel>(&model.parameters);
  const std::size_t n = y.size();
  if (scope == ImportanceScope::kPerMember && forest != nullptr) {
    std::size_t wrong = 0;
    for (const auto& tree : forest->trees) {
      for (std::size_t i = 0; i < n; ++i) {
        const bool phish = tree.score(std::span<const double>(x.data() + i * dim, dim)) >= 0.5;
        wrong += phish != (y[i] == kPhishing) ? 1 : 0;
      }
    }
    return static_cast<double>(wrong) / static_cast<double>(n * forest->trees.size());
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool phish = model.score(std::span<const double>(x.data() + i * dim, dim)) >= model.decision_threshold;
    wrong += phish != (y[i] == kPhishing) ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(n);
}

}  // namespace detail

// importance(f) = mean over repeats of (error with column f permuted -
// baseline error). Sorted by decreasing importance, ties in feature order.
// Repeat r of feature f uses seed derive_seed(rng_seed, f * n_repeats + r).
inline std::vector<FeatureImportance> permutation_importance(
    const TrainedModel& model, const Dataset& data, std::uint64_t rng_seed, int n_repeats,
    ImportanceScope scope = ImportanceScope::kPerMember, const Permutation& permute = shuffled_permutation,
    unsigned threads = 0) {
  data.check();
  require(data.size() >= 10, "permutation importance needs at least 10 samples");
  require(n_repeats >= 1, "n_repeats must be at least 1");
  require(data.dim() == model.dim(), "dataset width does not match model");
  const std::size_t d = data.dim();
  const std::size_t n = data.size();
  const double baseline = detail::member_error(model, scope, data.x, data.y, d);

  std::vector<double> importance(d, 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<double> x = data.x;
    for (;;) {
      const std::size_t f = next.fetch_add(1);
      if (f >= d) return;
      double total = 0.0;
      for (int r = 0; r < n_repeats; ++r) {
        const auto perm = permute(n, derive_seed(rng_seed, f * static_cast<std::size_t>(n_repeats) + r));
        require(perm.size() == n, "permutation has wrong length");
        for (std::size_t i = 0; i < n; ++i) x[i * d + f] = data.x[perm[i] * d + f];
        total += detail::member_error(model, scope, x, data.y, d) - baseline;
      }
      for (std::size_t i = 0; i < n; ++i) x[i * d + f] = data.x[i * d + f];
      importance[f] = total / n_repeats;
    }
  };
  unsigned t = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = std::min<unsigned>(t, static_cast<unsigned>(d));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<FeatureImportance> out;
  for (std::size_t f = 0; f < d; ++f) out.push_back({data.feature_names[f], f, importance[f]});
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.importance > b.importance; });
  return out;
}

}  // namespace tweetguard::ml
