#include <gtest/gtest.h>

#include "tweetguard/time.hpp"

namespace tweetguard {
namespace {

TEST(TimeTest, ParsesZuluAndFormatsBack) {
  const auto t = parse_iso8601("2012-02-01T10:00:00Z");
  ASSERT_TRUE(t);
  EXPECT_EQ(to_epoch(*t), 1328090400);
  EXPECT_EQ(format_iso8601(*t), "2012-02-01T10:00:00Z");
}

TEST(TimeTest, AcceptsDateOnlyOffsetsAndFractions) {
  EXPECT_EQ(to_epoch(*parse_iso8601("2011-05-01")), 1304208000);
  EXPECT_EQ(*parse_iso8601("2011-05-01T02:00:00+02:00"), *parse_iso8601("2011-05-01T00:00:00Z"));
  EXPECT_EQ(*parse_iso8601("2011-05-01T00:00:00.123Z"), *parse_iso8601("2011-05-01"));
  EXPECT_EQ(*parse_iso8601("2011-05-01 00:00:00 UTC"), *parse_iso8601("2011-05-01"));
}

TEST(TimeTest, RejectsGarbage) {
  EXPECT_FALSE(parse_iso8601(""));
  EXPECT_FALSE(parse_iso8601("2011-13-01"));
  EXPECT_FALSE(parse_iso8601("2011-02-30"));
  EXPECT_FALSE(parse_iso8601("01-May-2011"));
  EXPECT_FALSE(parse_iso8601("2011-05-01Tnoon"));
  EXPECT_THROW(parse_iso8601_or_throw("x", "field"), Error);
}

TEST(TimeTest, Durations) {
  EXPECT_EQ(parse_duration("3d").count(), 3 * 86400);
  EXPECT_EQ(parse_duration("72h").count(), 72 * 3600);
  EXPECT_EQ(parse_duration("1d12h").count(), 36 * 3600);
  EXPECT_EQ(parse_duration("90").count(), 90);
  EXPECT_EQ(parse_duration("0s").count(), 0);
  EXPECT_THROW(parse_duration("3w"), Error);
  EXPECT_THROW(parse_duration(""), Error);
}

TEST(TimeTest, DaysBetween) {
  EXPECT_DOUBLE_EQ(days_between(*parse_iso8601("2011-01-01"), *parse_iso8601("2012-01-01")), 365.0);
}

}  // namespace
}  // namespace tweetguard
