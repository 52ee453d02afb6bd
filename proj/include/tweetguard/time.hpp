#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "tweetguard/error.hpp"

namespace tweetguard {

// UTC instant with second precision.
using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

inline constexpr double kSecondsPerDay = 86400.0;

inline Timestamp from_epoch(std::int64_t seconds) {
  return Timestamp{Duration{seconds}};
}

inline std::int64_t to_epoch(Timestamp t) { return t.time_since_epoch().count(); }

inline double days_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / kSecondsPerDay;
}

namespace detail {

inline bool read_int(std::string_view s, std::size_t& pos, std::size_t digits, int& out) {
  if (pos + digits > s.size()) return false;
  for (std::size_t i = 0; i < digits; ++i) {
    if (s[pos + i] < '0' || s[pos + i] > '9') return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + digits, out);
  pos += digits;
  return true;
}

inline std::optional<Timestamp> make_timestamp(int y, int mo, int d, int h, int mi, int sec) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

}  // namespace detail

// Accepts `YYYY-MM-DD`, optionally followed by `T` or a space and
// `HH:MM[:SS[.fff]]`, then an optional `Z`, ` UTC` or `±HH[:MM]` offset.
// Fractional seconds are truncated.
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);

  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::read_int(s, pos, 4, y) || pos >= s.size() || s[pos++] != '-' ||
      !detail::read_int(s, pos, 2, mo) || pos >= s.size() || s[pos++] != '-' ||
      !detail::read_int(s, pos, 2, d)) {
    return std::nullopt;
  }
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
    ++pos;
    if (!detail::read_int(s, pos, 2, h) || pos >= s.size() || s[pos++] != ':' ||
        !detail::read_int(s, pos, 2, mi)) {
      return std::nullopt;
    }
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      if (!detail::read_int(s, pos, 2, sec)) return std::nullopt;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) return std::nullopt;
      }
    }
  }
  long offset_seconds = 0;
  const std::string_view rest = s.substr(pos);
  if (rest.empty() || rest == "Z" || rest == "z" || rest == " UTC" || rest == " GMT" ||
      rest == "UTC") {
    // UTC
  } else if (rest[0] == '+' || rest[0] == '-') {
    std::size_t p = 1;
    int oh = 0, om = 0;
    if (!detail::read_int(rest, p, 2, oh)) return std::nullopt;
    if (p < rest.size() && rest[p] == ':') ++p;
    if (p < rest.size() && !detail::read_int(rest, p, 2, om)) return std::nullopt;
    if (p != rest.size() || oh > 23 || om > 59) return std::nullopt;
    offset_seconds = (oh * 3600L + om * 60L) * (rest[0] == '+' ? 1 : -1);
  } else {
    return std::nullopt;
  }
  auto t = detail::make_timestamp(y, mo, d, h, mi, sec);
  if (!t) return std::nullopt;
  return *t - Duration{offset_seconds};
}

inline Timestamp parse_iso8601_or_throw(std::string_view s, std::string_view what) {
  auto t = parse_iso8601(s);
  if (!t) {
    throw Error(ErrorCode::kParse,
                "invalid timestamp for " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return *t;
}

inline std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

// Durations like `3d`, `72h`, `1d12h`, `90m`, `45s` or a bare number of
// seconds.
inline Duration parse_duration(std::string_view s) {
  if (s.empty()) throw Error(ErrorCode::kParse, "empty duration");
  std::int64_t total = 0;
  std::size_t pos = 0;
  bool any = false;
  while (pos < s.size()) {
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) {
      throw Error(ErrorCode::kParse, "invalid duration '" + std::string(s) + "'");
    }
    std::int64_t value = 0;
    std::from_chars(s.data() + start, s.data() + pos, value);
    std::int64_t unit = 1;
    if (pos < s.size()) {
      switch (s[pos]) {
        case 'd': unit = 86400; break;
        case 'h': unit = 3600; break;
        case 'm': unit = 60; break;
        case 's': unit = 1; break;
        default:
          throw Error(ErrorCode::kParse, "invalid duration unit in '" + std::string(s) + "'");
      }
      ++pos;
    } else if (any) {
      throw Error(ErrorCode::kParse, "missing duration unit in '" + std::string(s) + "'");
    }
    total += value * unit;
    any = true;
  }
  return Duration{total};
}

}  // namespace tweetguard
