#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tweetguard/corpus.hpp"
#include "tweetguard/error.hpp"
#include "tweetguard/redirect.hpp"
#include "tweetguard/text.hpp"
#include "tweetguard/time.hpp"

namespace tweetguard {

struct TrendEntry {
  std::string hashtag;
  Timestamp window_start{};
  Timestamp window_end{};
};

class TrendingContext {
 public:
  TrendingContext() = default;

  void add(TrendEntry entry) {
    if (!(entry.window_start < entry.window_end)) {
      throw Error(ErrorCode::kContract, "trend window for '" + entry.hashtag + "' is empty");
    }
    entry.hashtag = normalize_tag(entry.hashtag);
    by_tag_[entry.hashtag].push_back(entries_.size());
    entries_.push_back(std::move(entry));
  }

  // Windows are half-open: [window_start, window_end).
  bool is_trending(const std::string& tag, Timestamp at) const {
    auto it = by_tag_.find(normalize_tag(tag));
    if (it == by_tag_.end()) return false;
    for (std::size_t i : it->second) {
      if (entries_[i].window_start <= at && at < entries_[i].window_end) return true;
    }
    return false;
  }

  const std::vector<TrendEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  static TrendingContext from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::kParse, "trends file must be a JSON list");
    TrendingContext ctx;
    for (const auto& e : j) {
      if (!e.is_object() || !e.contains("hashtag") || !e["hashtag"].is_string() ||
          !e.contains("window_start") || !e.contains("window_end")) {
        throw Error(ErrorCode::kParse, "trend entry needs hashtag, window_start and window_end");
      }
      TrendEntry entry;
      entry.hashtag = e["hashtag"].get<std::string>();
      entry.window_start = parse_iso8601_or_throw(e["window_start"].get<std::string>(), "window_start");
      entry.window_end = parse_iso8601_or_throw(e["window_end"].get<std::string>(), "window_end");
      if (!(entry.window_start < entry.window_end)) {
        throw Error(ErrorCode::kParse, "trend window for '" + entry.hashtag + "' is empty");
      }
      ctx.add(std::move(entry));
    }
    return ctx;
  }

  static TrendingContext from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot read trends file " + path.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, "trends file " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : entries_) {
      out.push_back({{"hashtag", e.hashtag},
                     {"window_start", format_iso8601(e.window_start)},
                     {"window_end", format_iso8601(e.window_end)}});
    }
    return out;
  }

 private:
  static std::string normalize_tag(std::string_view tag) {
    if (tag.starts_with("#")) tag.remove_prefix(1);
    std::vector<UChar32> cps;
    if (!text::decode_utf8(tag, cps)) return text::ascii_lower(tag);
    std::string out;
    for (UChar32 c : cps) text::append_utf8(out, text::to_lower(c));
    return out;
  }

  std::vector<TrendEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_tag_;
};

struct TweetEntities {
  std::vector<std::string> hashtags;  // lowercased, without '#'
  std::vector<std::string> mentions;  // lowercased, without '@'
  long first_hashtag_position = -1;   // code-point index
};

// A tag is '#' or '@' followed by one or more word characters; the token
// ends at the first non-word character. No boundary is required before the
// sigil, so "#a#b" is two hashtags.
inline TweetEntities parse_entities(std::string_view tweet_text) {
  TweetEntities out;
  std::vector<UChar32> cps;
  if (!text::decode_utf8(tweet_text, cps)) {
    throw Error(ErrorCode::kParse, "tweet text is not valid UTF-8");
  }
  std::size_t i = 0;
  while (i < cps.size()) {
    const UChar32 c = cps[i];
    if ((c == '#' || c == '@') && i + 1 < cps.size() && text::is_word_char(cps[i + 1])) {
      std::string token;
      std::size_t j = i + 1;
      while (j < cps.size() && text::is_word_char(cps[j])) {
        text::append_utf8(token, text::to_lower(cps[j]));
        ++j;
      }
      if (c == '#') {
        if (out.first_hashtag_position < 0) out.first_hashtag_position = static_cast<long>(i);
        out.hashtags.push_back(std::move(token));
      } else {
        out.mentions.push_back(std::move(token));
      }
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

struct TweetFeatureSet {
  double num_hashtags = kMissing;
  double num_mentions = kMissing;
  double num_trending_hashtags = kMissing;
  double retweet_count = kMissing;
  double tweet_length = kMissing;
  double first_hashtag_position = kMissing;

  static constexpr std::size_t kSize = 6;

  std::array<double, kSize> values() const {
    return {num_hashtags, num_mentions,  num_trending_hashtags,
            retweet_count, tweet_length, first_hashtag_position};
  }

  static TweetFeatureSet missing() { return {}; }
};

inline TweetFeatureSet extract_f3(const Tweet& tweet, const TrendingContext& trends) {
  const TweetEntities entities = parse_entities(tweet.text);
  TweetFeatureSet f;
  f.num_hashtags = static_cast<double>(entities.hashtags.size());
  f.num_mentions = static_cast<double>(entities.mentions.size());
  long trending = 0;
  for (const auto& tag : entities.hashtags) {
    if (trends.is_trending(tag, tweet.created_at)) ++trending;
  }
  f.num_trending_hashtags = static_cast<double>(trending);
  f.retweet_count = static_cast<double>(tweet.retweet_count);
  f.tweet_length = static_cast<double>(text::code_point_count(tweet.text));
  f.first_hashtag_position = static_cast<double>(entities.first_hashtag_position);
  return f;
}

struct NetworkFeatureSet {
  double followers_count = kMissing;
  double followees_count = kMissing;
  double follower_followee_ratio = kMissing;
  double is_listed = kMissing;
  double account_age_days = kMissing;
  double has_description = kMissing;
  double statuses_count = kMissing;

  static constexpr std::size_t kSize = 7;

  std::array<double, kSize> values() const {
    return {followers_count,  followees_count, follower_followee_ratio, is_listed,
            account_age_days, has_description, statuses_count};
  }

  static NetworkFeatureSet missing() { return {}; }
};

inline NetworkFeatureSet extract_f4(const AccountProfile& profile, Timestamp tweet_time) {
  NetworkFeatureSet f;
  if (profile.is_protected) return f;
  f.followers_count = static_cast<double>(profile.followers_count);
  f.followees_count = static_cast<double>(profile.followees_count);
  f.follower_followee_ratio = static_cast<double>(profile.followers_count) /
                              static_cast<double>(std::max<std::uint64_t>(profile.followees_count, 1));
  f.is_listed = profile.listed_count > 0 ? 1.0 : 0.0;
  const double age = days_between(profile.created_at, tweet_time);
  f.account_age_days = age >= 0.0 ? age : kMissing;
  f.has_description = profile.has_description ? 1.0 : 0.0;
  f.statuses_count = static_cast<double>(profile.statuses_count);
  return f;
}

}  // namespace tweetguard
