#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetguard/error.hpp"
#include "tweetguard/redirect.hpp"
#include "tweetguard/social.hpp"
#include "tweetguard/whois.hpp"

namespace tweetguard {

inline constexpr std::size_t kFeatureCount = 22;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "url_length",           "num_dots",
    "num_subdomains",       "num_redirects",
    "avg_hop_levenshtein",  "conditional_redirect",
    "registrar_code",       "ownership_period_days",
    "domain_to_account_days", "num_hashtags",
    "num_mentions",         "num_trending_hashtags",
    "retweet_count",        "tweet_length",
    "first_hashtag_position", "followers_count",
    "followees_count",      "follower_followee_ratio",
    "is_listed",            "account_age_days",
    "has_description",      "statuses_count"};

enum class FeatureGroup { kUrl = 0, kWhois = 1, kTweet = 2, kNetwork = 3 };

inline constexpr std::array<std::size_t, 5> kGroupBounds = {0, 6, 9, 15, 22};

inline std::string_view group_name(FeatureGroup g) {
  static constexpr std::array<std::string_view, 4> kNames = {"F1", "F2", "F3", "F4"};
  return kNames[static_cast<std::size_t>(g)];
}

inline std::vector<std::string> feature_names() {
  return {kFeatureNames.begin(), kFeatureNames.end()};
}

// Names of the leading `groups` feature groups (1..4).
inline std::vector<std::string> feature_names_prefix(int groups) {
  require(groups >= 1 && groups <= 4, "feature group count must be 1..4");
  return {kFeatureNames.begin(), kFeatureNames.begin() + kGroupBounds[groups]};
}

inline std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  throw Error(ErrorCode::kContract, "unknown feature '" + std::string(name) + "'");
}

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  FeatureVector() { values.fill(kMissing); }

  static FeatureVector assemble(const UrlFeatureSet& f1, const WhoisFeatureSet& f2,
                                const TweetFeatureSet& f3, const NetworkFeatureSet& f4) {
    FeatureVector v;
    std::size_t i = 0;
    for (double x : f1.values()) v.values[i++] = x;
    for (double x : f2.values()) v.values[i++] = x;
    for (double x : f3.values()) v.values[i++] = x;
    for (double x : f4.values()) v.values[i++] = x;
    return v;
  }

  static FeatureVector from_span(std::span<const double> xs) {
    if (xs.size() != kFeatureCount) {
      throw Error(ErrorCode::kContract, "feature vector must have 22 values, got " +
                                            std::to_string(xs.size()));
    }
    FeatureVector v;
    std::copy(xs.begin(), xs.end(), v.values.begin());
    return v;
  }

  bool operator==(const FeatureVector&) const = default;
};

// Slot values must be finite and either non-negative or the -1 sentinel.
inline bool is_valid_feature_values(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
    if (x < 0.0 && x != kMissing) return false;
  }
  return true;
}

inline void validate_feature_values(std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (!std::isfinite(x) || (x < 0.0 && x != kMissing)) {
      const std::string name = i < kFeatureCount ? std::string(kFeatureNames[i]) : std::to_string(i);
      throw Error(ErrorCode::kContract, "feature " + name + " has invalid value " + std::to_string(x));
    }
  }
}

}  // namespace tweetguard
