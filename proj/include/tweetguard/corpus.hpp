#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tweetguard/error.hpp"
#include "tweetguard/text.hpp"
#include "tweetguard/time.hpp"
#include "tweetguard/url.hpp"
#include "tweetguard/verdict.hpp"

namespace tweetguard {

inline constexpr long kMaxTweetLength = 140;
inline constexpr int kCorpusSchemaVersion = 1;

struct AccountProfile {
  std::string user_id;
  Timestamp created_at{};
  std::uint64_t followers_count = 0;
  std::uint64_t followees_count = 0;
  std::uint64_t listed_count = 0;
  bool has_description = false;
  std::uint64_t statuses_count = 0;
  bool is_protected = false;

  bool operator==(const AccountProfile&) const = default;
};

struct Tweet {
  std::string id;
  std::string text;
  Timestamp created_at{};
  std::vector<std::string> urls;
  std::uint64_t retweet_count = 0;
  AccountProfile author;

  bool operator==(const Tweet&) const = default;
};

enum class LabelValue { kPhishing, kSafe };
enum class LabelSource { kBlacklist, kTwitterWarning, kManual, kClassifier };

inline std::string_view to_string(LabelValue v) {
  return v == LabelValue::kPhishing ? "phishing" : "safe";
}

inline LabelValue parse_label_value(std::string_view s) {
  if (s == "phishing") return LabelValue::kPhishing;
  if (s == "safe") return LabelValue::kSafe;
  throw Error(ErrorCode::kParse, "unknown label '" + std::string(s) + "'");
}

inline std::string_view to_string(LabelSource s) {
  switch (s) {
    case LabelSource::kBlacklist: return "blacklist";
    case LabelSource::kTwitterWarning: return "twitter_warning";
    case LabelSource::kManual: return "manual";
    case LabelSource::kClassifier: return "classifier";
  }
  return "manual";
}

inline LabelSource parse_label_source(std::string_view s) {
  if (s == "blacklist") return LabelSource::kBlacklist;
  if (s == "twitter_warning") return LabelSource::kTwitterWarning;
  if (s == "manual") return LabelSource::kManual;
  if (s == "classifier") return LabelSource::kClassifier;
  throw Error(ErrorCode::kParse, "unknown label source '" + std::string(s) + "'");
}

struct Label {
  LabelValue value = LabelValue::kSafe;
  LabelSource source = LabelSource::kBlacklist;
  Timestamp labeled_at{};

  bool operator==(const Label&) const = default;
};

struct CorpusEntry {
  Tweet tweet;
  std::optional<Label> label;

  bool operator==(const CorpusEntry&) const = default;
};

// Immutable once built; copies are cheap enough for the corpus sizes here.
struct LabeledCorpus {
  std::vector<CorpusEntry> entries;
  int schema_version = kCorpusSchemaVersion;

  bool operator==(const LabeledCorpus&) const = default;
};

// ---------------------------------------------------------------------------
// Tweet records

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string id_field(const nlohmann::json& obj, const char* key) {
  const auto& v = field(obj, key);
  std::string id;
  if (v.is_string()) {
    id = v.get<std::string>();
  } else if (v.is_number_unsigned()) {
    id = std::to_string(v.get<std::uint64_t>());
  } else {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a string");
  }
  if (id.empty() || id.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "' is not a decimal id");
  }
  return id;
}

inline std::uint64_t count_field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return 0;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(it->get<std::int64_t>());
  }
  throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a non-negative integer");
}

inline Timestamp time_field(const nlohmann::json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a string");
  return parse_iso8601_or_throw(v.get<std::string>(), key);
}

}  // namespace detail

// Parses one tweet object in the streaming-record schema. Unknown keys are
// ignored. Throws Error(kParse) on schema violations.
inline Tweet tweet_from_record(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "tweet record must be an object");
  Tweet t;
  t.id = detail::id_field(j, "id");
  const auto& text = detail::field(j, "text");
  if (!text.is_string()) throw Error(ErrorCode::kParse, "field 'text' must be a string");
  t.text = text.get<std::string>();
  if (!text::is_valid_utf8(t.text)) throw Error(ErrorCode::kParse, "tweet text is not valid UTF-8");
  t.created_at = detail::time_field(j, "created_at");
  if (auto it = j.find("urls"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::kParse, "field 'urls' must be an array");
    for (const auto& u : *it) {
      if (!u.is_string()) throw Error(ErrorCode::kParse, "urls must be strings");
      t.urls.push_back(u.get<std::string>());
    }
  }
  t.retweet_count = detail::count_field(j, "retweet_count");

  const auto& user = detail::field(j, "user");
  if (!user.is_object()) throw Error(ErrorCode::kParse, "field 'user' must be an object");
  AccountProfile& a = t.author;
  a.user_id = detail::id_field(user, "id");
  a.created_at = detail::time_field(user, "created_at");
  a.followers_count = detail::count_field(user, "followers_count");
  a.followees_count = detail::count_field(user, "friends_count");
  a.listed_count = detail::count_field(user, "listed_count");
  a.statuses_count = detail::count_field(user, "statuses_count");
  if (auto it = user.find("description"); it != user.end() && it->is_string()) {
    a.has_description = !text::trim(it->get<std::string>()).empty();
  }
  if (auto it = user.find("protected"); it != user.end() && !it->is_null()) {
    if (!it->is_boolean()) throw Error(ErrorCode::kParse, "field 'user.protected' must be boolean");
    a.is_protected = it->get<bool>();
  }
  if (a.created_at > t.created_at) {
    throw Error(ErrorCode::kParse, "account created after its tweet");
  }
  return t;
}

// Inverse of tweet_from_record (description is emitted as a placeholder
// string when present).
inline nlohmann::ordered_json tweet_to_record(const Tweet& t) {
  nlohmann::ordered_json user = {
      {"id", t.author.user_id},
      {"created_at", format_iso8601(t.author.created_at)},
      {"followers_count", t.author.followers_count},
      {"friends_count", t.author.followees_count},
      {"listed_count", t.author.listed_count},
      {"description", t.author.has_description ? "-" : ""},
      {"statuses_count", t.author.statuses_count},
      {"protected", t.author.is_protected},
  };
  return {{"id", t.id},
          {"text", t.text},
          {"created_at", format_iso8601(t.created_at)},
          {"urls", t.urls},
          {"retweet_count", t.retweet_count},
          {"user", std::move(user)}};
}

// ---------------------------------------------------------------------------
// Ingestion

struct IngestStats {
  std::size_t lines = 0;
  std::size_t admitted = 0;
  std::size_t skipped_malformed = 0;
  std::size_t skipped_no_url = 0;
  std::size_t skipped_too_long = 0;
  std::size_t skipped_duplicate_id = 0;
  std::size_t skipped_duplicate_text = 0;
  std::vector<std::string> warnings;

  std::size_t skipped() const {
    return skipped_malformed + skipped_no_url + skipped_too_long + skipped_duplicate_id +
           skipped_duplicate_text;
  }
};

struct IngestResult {
  LabeledCorpus corpus;
  IngestStats stats;
};

inline IngestResult ingest_lines(std::istream& in, bool dedupe_text) {
  IngestResult result;
  IngestStats& stats = result.stats;
  std::vector<Tweet> admitted;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++stats.lines;
    Tweet tweet;
    try {
      tweet = tweet_from_record(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      ++stats.skipped_malformed;
      stats.warnings.push_back("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
      continue;
    } catch (const Error& e) {
      ++stats.skipped_malformed;
      stats.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
      continue;
    }
    if (tweet.urls.empty()) {
      ++stats.skipped_no_url;
      continue;
    }
    if (text::code_point_count(tweet.text) > kMaxTweetLength) {
      ++stats.skipped_too_long;
      continue;
    }
    if (!seen_ids.insert(tweet.id).second) {
      ++stats.skipped_duplicate_id;
      stats.warnings.push_back("line " + std::to_string(line_no) + ": duplicate id " + tweet.id);
      continue;
    }
    admitted.push_back(std::move(tweet));
  }

  std::vector<bool> keep(admitted.size(), true);
  if (dedupe_text) {
    // Earliest created_at wins; file order breaks ties.
    std::unordered_map<std::string, std::size_t> first_by_text;
    for (std::size_t i = 0; i < admitted.size(); ++i) {
      const std::string key = text::nfc(admitted[i].text);
      auto [it, inserted] = first_by_text.emplace(key, i);
      if (inserted) continue;
      const std::size_t j = it->second;
      if (admitted[i].created_at < admitted[j].created_at) {
        keep[j] = false;
        it->second = i;
      } else {
        keep[i] = false;
      }
      ++stats.skipped_duplicate_text;
    }
  }
  for (std::size_t i = 0; i < admitted.size(); ++i) {
    if (keep[i]) result.corpus.entries.push_back({std::move(admitted[i]), std::nullopt});
  }
  stats.admitted = result.corpus.entries.size();
  return result;
}

inline IngestResult ingest_stream(const std::string& path, bool dedupe_text) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIngest, "cannot read tweet stream '" + path + "'");
  return ingest_lines(in, dedupe_text);
}

// ---------------------------------------------------------------------------
// Labeling

// A tweet is phishing iff any of its URLs carries a phishing or malware
// verdict; missing verdicts mean safe. Only entries whose label value
// changes (or that were unlabeled) get a new labeled_at, so the operation is
// idempotent for a fixed verdict set.
inline LabeledCorpus apply_labels(const LabeledCorpus& corpus,
                                  const std::vector<std::pair<std::string, BlacklistVerdict>>& verdicts,
                                  Timestamp at, LabelSource source = LabelSource::kBlacklist) {
  std::unordered_set<std::string> bad;
  for (const auto& [url, verdict] : verdicts) {
    if (is_malicious(verdict.status)) bad.insert(url);
  }
  LabeledCorpus out = corpus;
  for (auto& entry : out.entries) {
    bool phishing = false;
    for (const auto& raw : entry.tweet.urls) {
      try {
        if (bad.contains(normalize_url(raw).str())) phishing = true;
      } catch (const UrlParseError&) {
        // Unparsable URLs cannot match a verdict.
      }
    }
    const LabelValue value = phishing ? LabelValue::kPhishing : LabelValue::kSafe;
    if (!entry.label || entry.label->value != value) {
      entry.label = Label{value, source, std::max(at, entry.tweet.created_at)};
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::ordered_json corpus_to_json(const LabeledCorpus& corpus) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : corpus.entries) {
    const Tweet& t = e.tweet;
    nlohmann::ordered_json j = {
        {"id", t.id},
        {"text", t.text},
        {"created_at", format_iso8601(t.created_at)},
        {"urls", t.urls},
        {"retweet_count", t.retweet_count},
        {"author",
         {{"user_id", t.author.user_id},
          {"created_at", format_iso8601(t.author.created_at)},
          {"followers_count", t.author.followers_count},
          {"followees_count", t.author.followees_count},
          {"listed_count", t.author.listed_count},
          {"has_description", t.author.has_description},
          {"statuses_count", t.author.statuses_count},
          {"protected", t.author.is_protected}}},
    };
    if (e.label) {
      j["label"] = {{"value", to_string(e.label->value)},
                    {"source", to_string(e.label->source)},
                    {"labeled_at", format_iso8601(e.label->labeled_at)}};
    } else {
      j["label"] = nullptr;
    }
    entries.push_back(std::move(j));
  }
  return {{"kind", "labeled_corpus"},
          {"schema_version", corpus.schema_version},
          {"entries", std::move(entries)}};
}

inline LabeledCorpus corpus_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw Error(ErrorCode::kParse, "not a corpus document");
  }
  const int version = doc.at("schema_version").get<int>();
  if (version != kCorpusSchemaVersion) {
    throw Error(ErrorCode::kVersion, "corpus schema_version " + std::to_string(version) +
                                         " found, expected " + std::to_string(kCorpusSchemaVersion));
  }
  LabeledCorpus corpus;
  corpus.schema_version = version;
  std::unordered_set<std::string> ids;
  for (const auto& j : doc.at("entries")) {
    CorpusEntry e;
    Tweet& t = e.tweet;
    t.id = j.at("id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    t.created_at = parse_iso8601_or_throw(j.at("created_at").get<std::string>(), "created_at");
    t.urls = j.at("urls").get<std::vector<std::string>>();
    t.retweet_count = j.at("retweet_count").get<std::uint64_t>();
    const auto& a = j.at("author");
    t.author.user_id = a.at("user_id").get<std::string>();
    t.author.created_at =
        parse_iso8601_or_throw(a.at("created_at").get<std::string>(), "author.created_at");
    t.author.followers_count = a.at("followers_count").get<std::uint64_t>();
    t.author.followees_count = a.at("followees_count").get<std::uint64_t>();
    t.author.listed_count = a.at("listed_count").get<std::uint64_t>();
    t.author.has_description = a.at("has_description").get<bool>();
    t.author.statuses_count = a.at("statuses_count").get<std::uint64_t>();
    t.author.is_protected = a.at("protected").get<bool>();
    if (const auto& l = j.at("label"); !l.is_null()) {
      e.label = Label{parse_label_value(l.at("value").get<std::string>()),
                      parse_label_source(l.at("source").get<std::string>()),
                      parse_iso8601_or_throw(l.at("labeled_at").get<std::string>(), "labeled_at")};
    }
    if (t.urls.empty()) throw Error(ErrorCode::kParse, "corpus entry " + t.id + " has no URL");
    if (!ids.insert(t.id).second) throw Error(ErrorCode::kParse, "duplicate tweet id " + t.id);
    corpus.entries.push_back(std::move(e));
  }
  return corpus;
}

inline void persist(const LabeledCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write corpus '" + path + "'");
  out << corpus_to_json(corpus).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

inline LabeledCorpus load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read corpus '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "corpus '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return corpus_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "corpus '" + path + "': " + e.what());
  }
}

}  // namespace tweetguard
