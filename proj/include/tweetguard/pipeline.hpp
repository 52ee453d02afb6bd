#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "tweetguard/corpus.hpp"
#include "tweetguard/features.hpp"
#include "tweetguard/ml/dataset.hpp"
#include "tweetguard/redirect.hpp"
#include "tweetguard/social.hpp"
#include "tweetguard/whois.hpp"

namespace tweetguard {

using Millis = std::chrono::milliseconds;

struct GroupTimeouts {
  Millis overall{2000};
  Millis f1{1200};
  Millis f2{800};
  Millis f3{50};
  Millis f4{50};

  // For offline extraction, where waiting is cheaper than a degraded vector.
  static GroupTimeouts unlimited() {
    const Millis big = std::chrono::hours(24 * 365);
    return {big, big, big, big, big};
  }

  Millis group(FeatureGroup g) const {
    switch (g) {
      case FeatureGroup::kUrl: return f1;
      case FeatureGroup::kWhois: return f2;
      case FeatureGroup::kTweet: return f3;
      case FeatureGroup::kNetwork: return f4;
    }
    return overall;
  }
};

enum class ExtractionMode { kConcurrent, kSequential };

// Everything a feature extraction needs besides the tweet. Members are
// shared so that abandoned tasks never outlive what they use.
struct Extractors {
  std::shared_ptr<const UrlFetcher> fetcher;
  std::shared_ptr<const WhoisTransport> whois;
  std::shared_ptr<WhoisCache> whois_cache;  // optional
  std::shared_ptr<const TrendingContext> trends;
  TraceOptions trace;

  void check() const {
    require(fetcher != nullptr, "extractors need a URL fetcher");
    require(whois != nullptr, "extractors need a WHOIS transport");
    require(trends != nullptr, "extractors need a trending context");
  }
};

struct ExtractionResult {
  FeatureVector vector;
  std::array<bool, 4> timed_out{};
  std::array<Millis, 4> elapsed{};
  std::optional<std::string> registrar;  // raw WHOIS registrar of the landing domain
  bool whois_answered = false;

  bool partial() const {
    for (bool t : timed_out) {
      if (t) return true;
    }
    return false;
  }

  // A group counts as available when it did not time out and produced at
  // least one non-sentinel value.
  bool available(FeatureGroup g) const {
    const auto i = static_cast<std::size_t>(g);
    if (timed_out[i]) return false;
    for (std::size_t k = kGroupBounds[i]; k < kGroupBounds[i + 1]; ++k) {
      if (vector.values[k] != kMissing) return true;
    }
    return false;
  }
};

namespace detail {

// Runs `fn` on a detached thread. The promise lives as long as either side
// holds it, so a caller that stops waiting leaves nothing dangling.
template <typename Fn>
auto spawn(Fn fn) -> std::shared_future<decltype(fn())> {
  using R = decltype(fn());
  auto promise = std::make_shared<std::promise<R>>();
  std::shared_future<R> future = promise->get_future().share();
  std::thread([promise, fn = std::move(fn)]() mutable {
    try {
      promise->set_value(fn());
    } catch (...) {
      promise->set_exception(std::current_exception());
    }
  }).detach();
  return future;
}

struct WhoisOutcome {
  WhoisFeatureSet features;
  std::optional<std::string> registrar;
  bool answered = false;
};

// Browser chain kept even when broken mid-way, for lexical features.
inline std::optional<RedirectChain> browser_trace(const std::optional<NormalizedUrl>& url, const UrlFetcher& fetcher,
                                                  const TraceOptions& options) {
  if (!url) return std::nullopt;
  try {
    return trace_redirects(*url, AgentProfile::kBrowser, fetcher, options);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::optional<RedirectChain> bot_trace(const std::optional<NormalizedUrl>& url, const UrlFetcher& fetcher,
                                              const TraceOptions& options) {
  if (!url) return std::nullopt;
  return try_trace(*url, AgentProfile::kBot, fetcher, options);
}

inline WhoisOutcome whois_group(const std::optional<NormalizedUrl>& posted,
                                const std::optional<RedirectChain>& browser, const Tweet& tweet,
                                const Extractors& ex, const RegistrarTable& registrars) {
  WhoisOutcome out;
  std::string domain;
  if (browser) {
    domain = browser->landing().registrable_domain;
  } else if (posted) {
    domain = posted->registrable_domain;
  }
  if (domain.empty()) return out;
  try {
    const WhoisRecord record = ex.whois_cache ? ex.whois_cache->lookup(domain, *ex.whois)
                                              : query_whois(domain, *ex.whois);
    out.answered = true;
    out.registrar = record.registrar;
    out.features = extract_f2(record, tweet.author.created_at, tweet.created_at, registrars);
  } catch (const Error&) {
  }
  return out;
}

inline std::size_t posted_length(std::string_view raw) {
  return static_cast<std::size_t>(std::max(0L, text::code_point_count(text::trim(raw))));
}

inline std::optional<NormalizedUrl> try_normalize(std::string_view raw) {
  try {
    return normalize_url(raw);
  } catch (const UrlParseError&) {
    return std::nullopt;
  }
}

template <typename T>
std::optional<T> wait_for_result(const std::shared_future<T>& f, std::chrono::steady_clock::time_point deadline) {
  if (f.wait_until(deadline) != std::future_status::ready) return std::nullopt;
  try {
    return f.get();
  } catch (...) {
    return T{};
  }
}

}  // namespace detail

// Extracts all four groups for the tweet's first URL. F2 looks up the
// registrable domain the browser lands on, so F1 and F2 share one browser
// trace. Times are relative to tweet.created_at.
//
// Concurrent mode runs each group on its own task and stops waiting for a
// group at min(group timeout, overall deadline). Sequential mode runs the
// same steps one after another; a group that overran its timeout is
// discarded the same way.
inline ExtractionResult extract_features(const Tweet& tweet, const Extractors& extractors,
                                         const RegistrarTable& registrars, const GroupTimeouts& timeouts = {},
                                         ExtractionMode mode = ExtractionMode::kConcurrent) {
  extractors.check();
  if (tweet.urls.empty()) throw Error(ErrorCode::kUnprocessable, "tweet " + tweet.id + " has no URL");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const std::string raw_url = tweet.urls.front();
  const std::size_t length = detail::posted_length(raw_url);
  const std::optional<NormalizedUrl> url = detail::try_normalize(raw_url);

  UrlFeatureSet f1;
  detail::WhoisOutcome f2;
  TweetFeatureSet f3;
  NetworkFeatureSet f4;
  ExtractionResult result;
  auto group_deadline = [&](FeatureGroup g) { return start + std::min(timeouts.group(g), timeouts.overall); };
  auto mark = [&](FeatureGroup g, bool ok, Clock::time_point from) {
    const auto i = static_cast<std::size_t>(g);
    result.timed_out[i] = !ok;
    result.elapsed[i] = std::chrono::duration_cast<Millis>(Clock::now() - from);
  };

  if (mode == ExtractionMode::kSequential) {
    auto guarded = [&](FeatureGroup g, auto fn) {
      const auto t = Clock::now();
      auto value = fn();
      const bool ok = Clock::now() - t <= std::min(timeouts.group(g), timeouts.overall);
      mark(g, ok, t);
      return ok ? std::optional(std::move(value)) : std::nullopt;
    };
    std::optional<RedirectChain> browser;
    auto g1 = guarded(FeatureGroup::kUrl, [&] {
      browser = detail::browser_trace(url, *extractors.fetcher, extractors.trace);
      return url_features(length, browser, detail::bot_trace(url, *extractors.fetcher, extractors.trace));
    });
    auto g2 = guarded(FeatureGroup::kWhois,
                      [&] { return detail::whois_group(url, browser, tweet, extractors, registrars); });
    auto g3 = guarded(FeatureGroup::kTweet, [&] { return extract_f3(tweet, *extractors.trends); });
    auto g4 = guarded(FeatureGroup::kNetwork, [&] { return extract_f4(tweet.author, tweet.created_at); });
    if (g1) f1 = *g1;
    if (g2) f2 = *g2;
    if (g3) f3 = *g3;
    if (g4) f4 = *g4;
  } else {
    // Each task owns copies of what it reads.
    auto ex = std::make_shared<const Extractors>(extractors);
    auto shared_tweet = std::make_shared<const Tweet>(tweet);
    auto table = std::make_shared<const RegistrarTable>(registrars);
    auto browser = detail::spawn([ex, url] { return detail::browser_trace(url, *ex->fetcher, ex->trace); });
    auto bot = detail::spawn([ex, url] { return detail::bot_trace(url, *ex->fetcher, ex->trace); });
    auto t1 = detail::spawn([browser, bot, length] { return url_features(length, browser.get(), bot.get()); });
    auto t2 = detail::spawn([browser, url, shared_tweet, ex, table] {
      return detail::whois_group(url, browser.get(), *shared_tweet, *ex, *table);
    });
    auto t3 = detail::spawn([shared_tweet, ex] { return extract_f3(*shared_tweet, *ex->trends); });
    auto t4 = detail::spawn([shared_tweet] { return extract_f4(shared_tweet->author, shared_tweet->created_at); });

    // Cheapest deadlines first; every wait is bounded by its own deadline.
    auto r3 = detail::wait_for_result(t3, group_deadline(FeatureGroup::kTweet));
    mark(FeatureGroup::kTweet, r3.has_value(), start);
    auto r4 = detail::wait_for_result(t4, group_deadline(FeatureGroup::kNetwork));
    mark(FeatureGroup::kNetwork, r4.has_value(), start);
    auto r2 = detail::wait_for_result(t2, group_deadline(FeatureGroup::kWhois));
    mark(FeatureGroup::kWhois, r2.has_value(), start);
    auto r1 = detail::wait_for_result(t1, group_deadline(FeatureGroup::kUrl));
    mark(FeatureGroup::kUrl, r1.has_value(), start);
    if (r1) f1 = *r1;
    if (r2) f2 = *r2;
    if (r3) f3 = *r3;
    if (r4) f4 = *r4;
  }

  result.vector = FeatureVector::assemble(f1, f2.features, f3, f4);
  result.registrar = f2.registrar;
  result.whois_answered = f2.answered;
  return result;
}

// ---------------------------------------------------------------------------
// Fixture extractors

// Layout: <dir>/http.json (FixtureFetcher map), <dir>/whois/ (WHOIS answers),
// <dir>/trends.json, optional <dir>/fixture.json with {"whois_delay_ms": N}.
inline Extractors load_fixture_extractors(const std::filesystem::path& dir, bool with_cache = true) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "fixture directory " + dir.string() + " not found");
  Extractors ex;
  const fs::path http = dir / "http.json";
  ex.fetcher = std::make_shared<FixtureFetcher>(fs::exists(http) ? FixtureFetcher::from_file(http.string())
                                                                  : FixtureFetcher{});
  Millis whois_delay{0};
  if (const fs::path cfg = dir / "fixture.json"; fs::exists(cfg)) {
    std::ifstream in(cfg);
    try {
      whois_delay = Millis(nlohmann::json::parse(in).value("whois_delay_ms", 0L));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, cfg.string() + ": " + e.what());
    }
  }
  ex.whois = std::make_shared<FixtureWhoisTransport>(dir / "whois", whois_delay);
  if (with_cache) ex.whois_cache = std::make_shared<WhoisCache>();
  const fs::path trends = dir / "trends.json";
  ex.trends = std::make_shared<TrendingContext>(fs::exists(trends) ? TrendingContext::from_file(trends)
                                                                   : TrendingContext{});
  return ex;
}

// ---------------------------------------------------------------------------
// Vectors file

inline constexpr int kVectorsFormatVersion = 1;

struct VectorRow {
  std::string id;
  std::vector<std::string> urls;
  std::optional<LabelValue> label;
  std::vector<double> values;
};

struct VectorsFile {
  std::vector<std::string> feature_names = tweetguard::feature_names();
  RegistrarTable registrars;
  Timestamp generated_at{};
  std::vector<VectorRow> rows;

  // Labeled rows only.
  ml::Dataset dataset() const {
    ml::Dataset d;
    d.feature_names = feature_names;
    for (const auto& r : rows) {
      if (!r.label) continue;
      d.add(r.values, *r.label == LabelValue::kPhishing ? ml::kPhishing : ml::kSafe);
    }
    return d;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "feature_vectors";
    j["format_version"] = kVectorsFormatVersion;
    j["feature_names"] = feature_names;
    j["registrar_freq_table"] = registrars.to_json();
    j["generated_at"] = format_iso8601(generated_at);
    auto& out = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json row;
      row["id"] = r.id;
      row["urls"] = r.urls;
      row["label"] = r.label ? nlohmann::ordered_json(std::string(to_string(*r.label))) : nullptr;
      row["values"] = r.values;
      out.push_back(std::move(row));
    }
    return j;
  }

  static VectorsFile from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("kind", "") != "feature_vectors") {
      throw Error(ErrorCode::kParse, "not a feature_vectors file");
    }
    const int version = j.value("format_version", -1);
    if (version != kVectorsFormatVersion) {
      throw Error(ErrorCode::kVersion, "feature_vectors format_version " + std::to_string(version) +
                                           " found, expected " + std::to_string(kVectorsFormatVersion));
    }
    try {
      VectorsFile v;
      v.feature_names = j.at("feature_names").get<std::vector<std::string>>();
      long last = -1;
      for (const auto& name : v.feature_names) {
        const long idx = static_cast<long>(feature_index(name));
        if (idx <= last) throw Error(ErrorCode::kParse, "feature_names are not in canonical order");
        last = idx;
      }
      v.registrars = RegistrarTable::from_json(j.at("registrar_freq_table"));
      v.generated_at = parse_iso8601_or_throw(j.at("generated_at").get<std::string>(), "generated_at");
      for (const auto& row : j.at("rows")) {
        VectorRow r;
        r.id = row.at("id").get<std::string>();
        r.urls = row.value("urls", std::vector<std::string>{});
        if (const auto& l = row.at("label"); !l.is_null()) r.label = parse_label_value(l.get<std::string>());
        r.values = row.at("values").get<std::vector<double>>();
        if (r.values.size() != v.feature_names.size()) {
          throw Error(ErrorCode::kParse, "row " + r.id + " has " + std::to_string(r.values.size()) + " values");
        }
        v.rows.push_back(std::move(r));
      }
      return v;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("malformed feature_vectors file: ") + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kContract) throw Error(ErrorCode::kParse, e.what());
      throw;
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << to_json().dump(1) << '\n';
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }

  static VectorsFile load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    }
  }
};

inline std::string synthetic_row_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth-%06zu", i + 1);
  return buf;
}

inline VectorsFile vectors_from_dataset(const ml::Dataset& data) {
  data.check();
  VectorsFile v;
  v.feature_names = data.feature_names;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    const std::string id = synthetic_row_id(i);
    v.rows.push_back({id, {"http://" + id + ".example/"},
                      data.y[i] == ml::kPhishing ? LabelValue::kPhishing : LabelValue::kSafe,
                      {row.begin(), row.end()}});
  }
  return v;
}

struct ExtractionStats {
  std::size_t tweets = 0;
  std::size_t skipped_no_url = 0;
  std::array<std::size_t, 4> available{};
  std::array<std::size_t, 4> timed_out{};

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json groups = nlohmann::ordered_json::object();
    for (std::size_t g = 0; g < 4; ++g) {
      groups[std::string(group_name(static_cast<FeatureGroup>(g)))] = {{"available", available[g]},
                                                                        {"timed_out", timed_out[g]}};
    }
    return {{"tweets", tweets}, {"skipped_no_url", skipped_no_url}, {"groups", groups}};
  }
};

struct CorpusExtraction {
  VectorsFile vectors;
  ExtractionStats stats;
};

// Extracts every tweet, then builds the registrar table from the registrars
// seen and rewrites the registrar slot with it.
inline CorpusExtraction extract_corpus(const LabeledCorpus& corpus, const Extractors& extractors,
                                       const GroupTimeouts& timeouts = GroupTimeouts::unlimited(),
                                       ExtractionMode mode = ExtractionMode::kConcurrent) {
  CorpusExtraction out;
  std::vector<ExtractionResult> results;
  RegistrarTable empty;
  for (const auto& entry : corpus.entries) {
    out.vectors.generated_at = std::max(out.vectors.generated_at, entry.tweet.created_at);
    if (entry.label) out.vectors.generated_at = std::max(out.vectors.generated_at, entry.label->labeled_at);
    if (entry.tweet.urls.empty()) {
      ++out.stats.skipped_no_url;
      continue;
    }
    ExtractionResult r = extract_features(entry.tweet, extractors, empty, timeouts, mode);
    if (r.registrar) out.vectors.registrars.add(*r.registrar);
    out.vectors.rows.push_back({entry.tweet.id, entry.tweet.urls,
                                entry.label ? std::optional(entry.label->value) : std::nullopt,
                                {r.vector.values.begin(), r.vector.values.end()}});
    results.push_back(std::move(r));
  }
  const std::size_t slot = feature_index("registrar_code");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.whois_answered && !r.timed_out[static_cast<std::size_t>(FeatureGroup::kWhois)]) {
      out.vectors.rows[i].values[slot] = out.vectors.registrars.code(r.registrar);
    }
    ++out.stats.tweets;
    for (std::size_t g = 0; g < 4; ++g) {
      if (r.available(static_cast<FeatureGroup>(g))) ++out.stats.available[g];
      if (r.timed_out[g]) ++out.stats.timed_out[g];
    }
  }
  return out;
}

}  // namespace tweetguard
