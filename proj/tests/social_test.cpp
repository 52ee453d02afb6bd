#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <regex>

#include "tweetguard/rng.hpp"
#include "tweetguard/social.hpp"

namespace tweetguard {
namespace {

Timestamp ts(const char* s) { return *parse_iso8601(s); }

// Reference tokenizer for ASCII text: leftmost non-overlapping matches.
struct OracleTags {
  std::vector<std::string> hashtags, mentions;
  long position = -1;
};

OracleTags oracle_tokenize(const std::string& s) {
  OracleTags out;
  static const std::regex kTag("[#@][A-Za-z0-9_]+");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kTag); it != std::sregex_iterator(); ++it) {
    std::string tok = it->str().substr(1);
    std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) { return std::tolower(c); });
    if (it->str()[0] == '#') {
      if (out.position < 0) out.position = it->position();
      out.hashtags.push_back(tok);
    } else {
      out.mentions.push_back(tok);
    }
  }
  return out;
}

TEST(ParseEntitiesTest, Examples) {
  auto e = parse_entities("Win now #Euro2012 @John");
  EXPECT_EQ(e.hashtags, std::vector<std::string>{"euro2012"});
  EXPECT_EQ(e.mentions, std::vector<std::string>{"john"});
  EXPECT_EQ(e.first_hashtag_position, 8);

  e = parse_entities("no tags here http://x.y");
  EXPECT_TRUE(e.hashtags.empty());
  EXPECT_TRUE(e.mentions.empty());
  EXPECT_EQ(e.first_hashtag_position, -1);
}

TEST(ParseEntitiesTest, AdjacentTags) {
  const auto e = parse_entities("#a#b @c@d");
  EXPECT_EQ(e.hashtags, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(e.mentions, (std::vector<std::string>{"c", "d"}));
  const auto o = oracle_tokenize("#a#b @c@d");
  EXPECT_EQ(o.hashtags, e.hashtags);
  EXPECT_EQ(o.mentions, e.mentions);
}

TEST(ParseEntitiesTest, BareSigilsAreNotTags) {
  const auto e = parse_entities("# @ ## @@ #! x#");
  EXPECT_TRUE(e.hashtags.empty());
  EXPECT_TRUE(e.mentions.empty());
}

TEST(ParseEntitiesTest, PositionCountsCodePoints) {
  const auto e = parse_entities("caf\xc3\xa9 \xe2\x82\xac #deal");
  EXPECT_EQ(e.first_hashtag_position, 7);
  const auto u = parse_entities("#\xc3\x9c" "ber_alles");
  EXPECT_EQ(u.hashtags, std::vector<std::string>{"\xc3\xbc" "ber_alles"});
}

TEST(ParseEntitiesTest, MatchesOracleOnRandomAscii) {
  static const std::string kAlphabet = "ab_Z9#@ .,!-#@";
  Rng rng(11);
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const int len = static_cast<int>(rng.below(60));
    for (int k = 0; k < len; ++k) s += kAlphabet[rng.below(kAlphabet.size())];
    const auto e = parse_entities(s);
    const auto o = oracle_tokenize(s);
    ASSERT_EQ(e.hashtags, o.hashtags) << s;
    ASSERT_EQ(e.mentions, o.mentions) << s;
    ASSERT_EQ(e.first_hashtag_position, o.position) << s;
  }
}

TEST(ParseEntitiesTest, CountsInvariantUnderReversingFillers) {
  static const std::string kFiller = "abc xyz 123 .,!?-:/";
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> parts;
    const int n = 1 + static_cast<int>(rng.below(8));
    for (int k = 0; k < n; ++k) {
      if (rng.bernoulli(0.5)) {
        std::string tag(1, rng.bernoulli(0.5) ? '#' : '@');
        const int tl = 1 + static_cast<int>(rng.below(6));
        for (int t = 0; t < tl; ++t) tag += static_cast<char>('a' + rng.below(26));
        parts.push_back(tag);
      } else {
        std::string filler = " ";
        const int fl = static_cast<int>(rng.below(10));
        for (int t = 0; t < fl; ++t) filler += kFiller[rng.below(kFiller.size())];
        parts.push_back(filler + " ");
      }
    }
    std::string forward, reversed;
    for (const auto& p : parts) {
      forward += p + " ";
      const bool tag = p[0] == '#' || p[0] == '@';
      reversed += (tag ? p : std::string(p.rbegin(), p.rend())) + " ";
    }
    const auto a = parse_entities(forward);
    const auto b = parse_entities(reversed);
    EXPECT_EQ(a.hashtags, b.hashtags);
    EXPECT_EQ(a.mentions, b.mentions);
  }
}

Tweet make_tweet(const std::string& text, Timestamp at) {
  Tweet t;
  t.id = "1";
  t.text = text;
  t.created_at = at;
  t.urls = {"http://x.example/"};
  t.retweet_count = 4;
  return t;
}

TEST(ExtractF3Test, TrendingWindowIsHalfOpen) {
  const Timestamp t = ts("2012-06-10T12:00:00Z");
  TrendingContext inside;
  inside.add({"x", t - std::chrono::hours(1), t + std::chrono::hours(1)});
  EXPECT_EQ(extract_f3(make_tweet("go #x", t), inside).num_trending_hashtags, 1.0);

  TrendingContext ends_at_t;
  ends_at_t.add({"x", t - std::chrono::hours(1), t});
  EXPECT_EQ(extract_f3(make_tweet("go #x", t), ends_at_t).num_trending_hashtags, 0.0);

  TrendingContext starts_at_t;
  starts_at_t.add({"x", t, t + std::chrono::hours(1)});
  EXPECT_EQ(extract_f3(make_tweet("go #x", t), starts_at_t).num_trending_hashtags, 1.0);
}

TEST(ExtractF3Test, CountsTrendingSubset) {
  const Timestamp t = ts("2012-06-10T12:00:00Z");
  TrendingContext trends;
  trends.add({"#Euro2012", t - std::chrono::hours(5), t + std::chrono::hours(5)});
  trends.add({"olympics", t - std::chrono::hours(5), t + std::chrono::hours(5)});
  trends.add({"stale", t - std::chrono::hours(50), t - std::chrono::hours(40)});
  const auto f = extract_f3(make_tweet("#euro2012 #Olympics #stale @me http://x.example/", t), trends);
  EXPECT_EQ(f.num_hashtags, 3.0);
  EXPECT_EQ(f.num_trending_hashtags, 2.0);
  EXPECT_EQ(f.num_mentions, 1.0);
  EXPECT_EQ(f.retweet_count, 4.0);
  EXPECT_EQ(f.tweet_length, 48.0);
  EXPECT_EQ(f.first_hashtag_position, 0.0);
}

TEST(ExtractF3Test, EmptyContextNeverTrendsAndSlotsInRange) {
  Rng rng(5);
  const TrendingContext empty;
  static const std::string kAlphabet = "ab #@ xy_";
  for (int i = 0; i < 1000; ++i) {
    std::string s = "t";
    const int len = static_cast<int>(rng.below(139));
    for (int k = 0; k < len; ++k) s += kAlphabet[rng.below(kAlphabet.size())];
    const auto f = extract_f3(make_tweet(s, ts("2012-01-01")), empty);
    EXPECT_EQ(f.num_trending_hashtags, 0.0);
    EXPECT_GE(f.tweet_length, 1.0);
    EXPECT_LE(f.tweet_length, 140.0);
    EXPECT_TRUE(f.first_hashtag_position == -1.0 ||
                (f.first_hashtag_position >= 0 && f.first_hashtag_position < f.tweet_length));
  }
}

TEST(TrendingContextTest, LoadsJsonAndRejectsEmptyWindow) {
  const auto ctx = TrendingContext::from_json(nlohmann::json::parse(
      R"([{"hashtag":"Euro2012","window_start":"2012-06-08T00:00:00Z","window_end":"2012-07-02T00:00:00Z"}])"));
  EXPECT_TRUE(ctx.is_trending("euro2012", ts("2012-06-10")));
  EXPECT_FALSE(ctx.is_trending("euro2012", ts("2012-07-02")));
  EXPECT_EQ(TrendingContext::from_json(ctx.to_json()).entries().size(), 1u);
  EXPECT_THROW(TrendingContext::from_json(nlohmann::json::parse(
                   R"([{"hashtag":"x","window_start":"2012-06-08","window_end":"2012-06-08"}])")),
               Error);
  EXPECT_THROW(TrendingContext::from_json(nlohmann::json::parse(R"({"hashtag":"x"})")), Error);
}

TEST(ExtractF4Test, Examples) {
  AccountProfile p;
  p.followers_count = 50;
  p.followees_count = 0;
  p.created_at = ts("2012-01-01");
  p.listed_count = 2;
  p.has_description = true;
  p.statuses_count = 99;
  const auto f = extract_f4(p, ts("2012-01-11"));
  EXPECT_EQ(f.follower_followee_ratio, 50.0);
  EXPECT_EQ(f.account_age_days, 10.0);
  EXPECT_EQ(f.is_listed, 1.0);
  EXPECT_EQ(f.has_description, 1.0);
  EXPECT_EQ(f.statuses_count, 99.0);
  EXPECT_EQ(f.followees_count, 0.0);

  p.is_protected = true;
  for (double v : extract_f4(p, ts("2012-01-11")).values()) EXPECT_EQ(v, -1.0);
}

TEST(ExtractF4Test, RatioFiniteAndAgeNonNegative) {
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    AccountProfile p;
    p.followers_count = rng.below(1u << 30);
    p.followees_count = rng.bernoulli(0.2) ? 0 : rng.below(1u << 30);
    p.created_at = from_epoch(static_cast<std::int64_t>(rng.below(1000000000)));
    const auto f = extract_f4(p, from_epoch(1000000000));
    EXPECT_TRUE(std::isfinite(f.follower_followee_ratio));
    EXPECT_GE(f.follower_followee_ratio, 0.0);
    EXPECT_GE(f.account_age_days, 0.0);
  }
}

}  // namespace
}  // namespace tweetguard
