#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tweetguard/corpus.hpp"
#include "tweetguard/error.hpp"
#include "tweetguard/features.hpp"
#include "tweetguard/ml/model.hpp"
#include "tweetguard/time.hpp"
#include "tweetguard/url.hpp"
#include "tweetguard/verdict.hpp"

namespace tweetguard {

struct BlacklistEntry {
  std::string pattern;  // normalized URL, or a lowercase host for domain entries
  bool exact = false;
  VerdictStatus status = VerdictStatus::kPhishing;
  Timestamp added_at{};

  bool operator==(const BlacklistEntry&) const = default;
};

// Phishing outranks malware, which outranks an explicit safe listing.
inline int severity(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kPhishing: return 3;
    case VerdictStatus::kMalware: return 2;
    case VerdictStatus::kSafe: return 1;
    case VerdictStatus::kUnknown: return 0;
  }
  return 0;
}

// Immutable snapshot of one blacklist source. A lookup at time t sees only
// entries with added_at <= t.
class BlacklistStore {
 public:
  BlacklistStore() = default;
  explicit BlacklistStore(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const std::vector<BlacklistEntry>& entries() const { return entries_; }

  // `pattern` is a URL if it has a scheme, otherwise a domain that also
  // covers its subdomains.
  void add(std::string_view pattern, VerdictStatus status, Timestamp added_at) {
    require(status != VerdictStatus::kUnknown, "blacklist entries cannot be 'unknown'");
    BlacklistEntry e;
    e.status = status;
    e.added_at = added_at;
    pattern = text::trim(pattern);
    if (pattern.find("://") != std::string_view::npos) {
      e.exact = true;
      e.pattern = normalize_url(pattern).str();
      exact_[e.pattern].push_back(entries_.size());
    } else {
      e.pattern = normalize_url("http://" + std::string(pattern)).host;
      domain_[e.pattern].push_back(entries_.size());
    }
    entries_.push_back(std::move(e));
  }

  BlacklistVerdict lookup(const NormalizedUrl& url, Timestamp at) const {
    BlacklistVerdict v;
    v.url = url.str();
    v.as_of = at;
    VerdictStatus exact = best(exact_, v.url, at);
    if (exact != VerdictStatus::kUnknown) {
      v.status = exact;
    } else {
      VerdictStatus domain = VerdictStatus::kUnknown;
      std::string_view host = url.host;
      for (;;) {
        const VerdictStatus s = best(domain_, std::string(host), at);
        if (severity(s) > severity(domain)) domain = s;
        const std::size_t dot = host.find('.');
        if (dot == std::string_view::npos) break;
        host.remove_prefix(dot + 1);
      }
      v.status = domain;
    }
    if (v.status != VerdictStatus::kUnknown) v.source = name_;
    return v;
  }

  BlacklistVerdict lookup(std::string_view url, Timestamp at) const { return lookup(normalize_url(url), at); }

  // Format: `status<TAB>pattern<TAB>added_at` per line; '#' starts a comment.
  static BlacklistStore parse(std::istream& in, std::string name, const std::string& origin = "blacklist") {
    BlacklistStore store(std::move(name));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string_view trimmed = text::trim(line);
      if (trimmed.empty() || trimmed.starts_with("#")) continue;
      std::vector<std::string_view> fields;
      std::size_t start = 0;
      for (;;) {
        const std::size_t tab = trimmed.find('\t', start);
        fields.push_back(text::trim(trimmed.substr(start, tab == std::string_view::npos ? tab : tab - start)));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
      }
      const std::string where = origin + ":" + std::to_string(line_no) + ": ";
      if (fields.size() != 3) throw Error(ErrorCode::kParse, where + "expected 3 tab-separated fields");
      try {
        store.add(fields[1], parse_verdict_status(text::ascii_lower(fields[0])),
                  parse_iso8601_or_throw(fields[2], "added_at"));
      } catch (const Error& e) {
        throw Error(ErrorCode::kParse, where + e.what());
      }
    }
    return store;
  }

  static BlacklistStore from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot read blacklist " + path.string());
    return parse(in, path.stem().string(), path.string());
  }

  std::string to_text() const {
    std::string out;
    for (const auto& e : entries_) {
      out += std::string(to_string(e.status)) + "\t" + e.pattern + "\t" + format_iso8601(e.added_at) + "\n";
    }
    return out;
  }

 private:
  using Index = std::unordered_map<std::string, std::vector<std::size_t>>;

  VerdictStatus best(const Index& index, const std::string& key, Timestamp at) const {
    auto it = index.find(key);
    if (it == index.end()) return VerdictStatus::kUnknown;
    VerdictStatus out = VerdictStatus::kUnknown;
    for (std::size_t i : it->second) {
      const auto& e = entries_[i];
      if (e.added_at <= at && severity(e.status) > severity(out)) out = e.status;
    }
    return out;
  }

  std::string name_;
  std::vector<BlacklistEntry> entries_;
  Index exact_;
  Index domain_;
};

// Most severe verdict over all stores; Unknown when none lists the URL.
inline BlacklistVerdict lookup(std::span<const BlacklistStore> stores, const NormalizedUrl& url, Timestamp at) {
  BlacklistVerdict out;
  out.url = url.str();
  out.as_of = at;
  for (const auto& s : stores) {
    BlacklistVerdict v = s.lookup(url, at);
    if (severity(v.status) > severity(out.status)) out = std::move(v);
  }
  return out;
}

inline bool any_url_malicious(std::span<const BlacklistStore> stores, const std::vector<std::string>& urls,
                              Timestamp at) {
  for (const auto& raw : urls) {
    try {
      if (is_malicious(lookup(stores, normalize_url(raw), at).status)) return true;
    } catch (const UrlParseError&) {
    }
  }
  return false;
}

// One verdict per distinct normalized URL in the corpus, for apply_labels.
inline std::vector<std::pair<std::string, BlacklistVerdict>> verdicts_at(const LabeledCorpus& corpus,
                                                                        std::span<const BlacklistStore> stores,
                                                                        Timestamp at) {
  std::vector<std::pair<std::string, BlacklistVerdict>> out;
  std::unordered_set<std::string> seen;
  for (const auto& e : corpus.entries) {
    for (const auto& raw : e.tweet.urls) {
      try {
        const NormalizedUrl url = normalize_url(raw);
        const std::string key = url.str();
        if (!seen.insert(key).second) continue;
        out.emplace_back(key, lookup(stores, url, at));
      } catch (const UrlParseError&) {
      }
    }
  }
  return out;
}

struct RelabelResult {
  LabeledCorpus corpus;
  std::size_t flips = 0;  // Safe -> Phishing
};

// Re-checks every tweet at t0 + delay. Entries without a label first get
// their zero-hour label from a lookup at t0. Labels only move from Safe to
// Phishing, since blacklists only grow.
inline RelabelResult delayed_relabel(const LabeledCorpus& corpus, std::span<const BlacklistStore> stores,
                                     Timestamp t0, Duration delay) {
  if (delay.count() < 0) throw Error(ErrorCode::kContract, "relabel delay must not be negative");
  const Timestamp later = t0 + delay;
  RelabelResult out;
  out.corpus = corpus;
  for (auto& entry : out.corpus.entries) {
    if (!entry.label) {
      const bool bad = any_url_malicious(stores, entry.tweet.urls, t0);
      entry.label = Label{bad ? LabelValue::kPhishing : LabelValue::kSafe, LabelSource::kBlacklist,
                          std::max(t0, entry.tweet.created_at)};
    }
    if (entry.label->value == LabelValue::kSafe && any_url_malicious(stores, entry.tweet.urls, later)) {
      entry.label = Label{LabelValue::kPhishing, LabelSource::kBlacklist, std::max(later, entry.tweet.created_at)};
      ++out.flips;
    }
  }
  return out;
}

struct CatchItem {
  std::vector<std::string> urls;
  std::vector<double> features;
};

struct CatchRate {
  std::size_t caught = 0;
  std::size_t eligible = 0;  // clean at t0, blacklisted by t0 + delay

  double rate() const { return static_cast<double>(caught) / static_cast<double>(eligible); }
};

// Share of the late-blacklisted items that the model already calls
// phishing at first sight.
inline CatchRate zero_hour_catch_rate(const ml::TrainedModel& model, std::span<const CatchItem> items,
                                      std::span<const BlacklistStore> stores, Timestamp t0, Duration delay) {
  if (delay.count() < 0) throw Error(ErrorCode::kContract, "catch-rate delay must not be negative");
  CatchRate r;
  for (const auto& item : items) {
    if (any_url_malicious(stores, item.urls, t0)) continue;
    if (!any_url_malicious(stores, item.urls, t0 + delay)) continue;
    ++r.eligible;
    if (ml::predict(model, item.features).label == LabelValue::kPhishing) ++r.caught;
  }
  if (r.eligible == 0) {
    throw Error(ErrorCode::kNoLateBlacklisted, "no late-blacklisted tweets between t0 and t0 + delay");
  }
  return r;
}

inline CatchRate zero_hour_catch_rate(const ml::TrainedModel& model, const LabeledCorpus& corpus,
                                      const std::function<FeatureVector(const Tweet&)>& extract,
                                      std::span<const BlacklistStore> stores, Timestamp t0, Duration delay) {
  std::vector<CatchItem> items;
  for (const auto& e : corpus.entries) {
    // Feature extraction is only needed for tweets that end up eligible.
    if (any_url_malicious(stores, e.tweet.urls, t0) || !any_url_malicious(stores, e.tweet.urls, t0 + delay)) {
      continue;
    }
    const FeatureVector v = extract(e.tweet);
    items.push_back({e.tweet.urls, {v.values.begin(), v.values.end()}});
  }
  return zero_hour_catch_rate(model, items, stores, t0, delay);
}

}  // namespace tweetguard
