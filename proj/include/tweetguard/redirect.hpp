#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "tweetguard/error.hpp"
#include "tweetguard/levenshtein.hpp"
#include "tweetguard/url.hpp"

namespace tweetguard {

inline constexpr double kMissing = -1.0;

enum class AgentProfile { kBrowser, kBot };

inline std::string_view user_agent(AgentProfile agent) {
  if (agent == AgentProfile::kBot) {
    return "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)";
  }
  return "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) "
         "Chrome/120.0.0.0 Safari/537.36";
}

inline std::string_view to_string(AgentProfile agent) {
  return agent == AgentProfile::kBot ? "bot" : "browser";
}

enum class FetchFailure { kNone, kDns, kConnect, kTimeout, kProtocol };

struct FetchResult {
  FetchFailure failure = FetchFailure::kNone;
  int status = 0;
  std::string location;  // raw Location header, empty if absent
  bool body_meta_refresh = false;
  std::string error;

  bool ok() const { return failure == FetchFailure::kNone; }
  bool is_redirect() const { return ok() && status >= 300 && status <= 399 && !location.empty(); }
};

// One HTTP GET without following redirects. Implementations must be safe to
// call concurrently.
class UrlFetcher {
 public:
  virtual ~UrlFetcher() = default;
  virtual FetchResult fetch(const NormalizedUrl& url, AgentProfile agent) const = 0;
};

// Replays canned responses from a JSON map keyed by URL:
//   {"http://a/": {"status": 302, "location": "http://b/", "body_meta_refresh": false,
//                  "delay_ms": 40, "agents": {"bot": {"status": 301, "location": "..."}}}}
// `error` ("dns", "connect", "timeout") simulates a transport failure. URLs
// missing from the map fail as unresolvable.
class FixtureFetcher : public UrlFetcher {
 public:
  struct Response {
    FetchFailure failure = FetchFailure::kNone;
    int status = 200;
    std::string location;
    bool body_meta_refresh = false;
    std::chrono::milliseconds delay{0};
  };

  FixtureFetcher() = default;

  static FixtureFetcher from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::kParse, "fixture fetcher map must be an object");
    FixtureFetcher f;
    for (const auto& [raw, spec] : doc.items()) {
      const std::string key = normalize_url(raw).str();
      Entry entry;
      entry.base = parse_response(spec, Response{});
      if (auto agents = spec.find("agents"); agents != spec.end()) {
        if (auto b = agents->find("browser"); b != agents->end()) {
          entry.browser = parse_response(*b, entry.base);
        }
        if (auto b = agents->find("bot"); b != agents->end()) {
          entry.bot = parse_response(*b, entry.base);
        }
      }
      f.entries_[key] = std::move(entry);
    }
    return f;
  }

  static FixtureFetcher from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot read fetcher fixture '" + path + "'");
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, "fetcher fixture '" + path + "': " + e.what());
    }
  }

  void set(const std::string& url, Response response) {
    entries_[normalize_url(url).str()].base = response;
  }

  void set_for_agent(const std::string& url, AgentProfile agent, Response response) {
    Entry& e = entries_[normalize_url(url).str()];
    (agent == AgentProfile::kBot ? e.bot : e.browser) = response;
  }

  // Latency added to every fetch on top of per-entry delays.
  void set_default_delay(std::chrono::milliseconds delay) { default_delay_ = delay; }

  FetchResult fetch(const NormalizedUrl& url, AgentProfile agent) const override {
    auto it = entries_.find(url.str());
    if (it == entries_.end()) {
      sleep(default_delay_);
      return {FetchFailure::kDns, 0, "", false, "no fixture for " + url.str()};
    }
    const Entry& e = it->second;
    const Response& r = agent == AgentProfile::kBot ? (e.bot ? *e.bot : e.base)
                                                    : (e.browser ? *e.browser : e.base);
    sleep(default_delay_ + r.delay);
    if (r.failure != FetchFailure::kNone) {
      return {r.failure, 0, "", false, "simulated failure for " + url.str()};
    }
    return {FetchFailure::kNone, r.status, r.location, r.body_meta_refresh, ""};
  }

 private:
  struct Entry {
    Response base;
    std::optional<Response> browser;
    std::optional<Response> bot;
  };

  static void sleep(std::chrono::milliseconds d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
  }

  static Response parse_response(const nlohmann::json& j, Response r) {
    if (!j.is_object()) throw Error(ErrorCode::kParse, "fixture response must be an object");
    if (auto it = j.find("status"); it != j.end()) r.status = it->get<int>();
    if (auto it = j.find("location"); it != j.end()) {
      r.location = it->is_null() ? "" : it->get<std::string>();
    }
    if (auto it = j.find("body_meta_refresh"); it != j.end()) r.body_meta_refresh = it->get<bool>();
    if (auto it = j.find("delay_ms"); it != j.end()) {
      r.delay = std::chrono::milliseconds(it->get<long>());
    }
    if (auto it = j.find("error"); it != j.end()) {
      const std::string kind = it->get<std::string>();
      if (kind == "dns") r.failure = FetchFailure::kDns;
      else if (kind == "connect") r.failure = FetchFailure::kConnect;
      else if (kind == "timeout") r.failure = FetchFailure::kTimeout;
      else throw Error(ErrorCode::kParse, "unknown fixture error kind '" + kind + "'");
    }
    return r;
  }

  std::map<std::string, Entry> entries_;
  std::chrono::milliseconds default_delay_{0};
};

// ---------------------------------------------------------------------------
// Redirect chains

struct RedirectChain {
  std::vector<NormalizedUrl> hops;  // hops.front() is the posted URL
  std::vector<int> statuses;        // one 3xx status per transition
  std::optional<int> final_status;  // status of the landing response
  AgentProfile agent = AgentProfile::kBrowser;
  bool truncated = false;            // hop cap or loop
  bool failed = false;               // transport failure after the first hop
  bool landing_meta_refresh = false; // diagnostic only; meta refresh is not followed

  const NormalizedUrl& landing() const { return hops.back(); }
  int redirect_count() const { return static_cast<int>(hops.size()) - 1; }
};

struct TraceOptions {
  std::size_t max_hops = 10;
  std::chrono::milliseconds budget{8000};
};

// Follows 3xx Location headers from `url`. Stops at the first non-redirect
// response, at max_hops (truncated), on revisiting a URL (truncated), or on
// a transport failure (failed). A failure on the very first request throws
// Error(kFetch) since there is no chain to return.
inline RedirectChain trace_redirects(const NormalizedUrl& url, AgentProfile agent,
                                     const UrlFetcher& fetcher, const TraceOptions& options = {}) {
  require(options.max_hops >= 1, "max_hops must be at least 1");
  const auto deadline = std::chrono::steady_clock::now() + options.budget;
  RedirectChain chain;
  chain.agent = agent;
  chain.hops.push_back(url);
  std::unordered_set<std::string> visited{url.str()};
  while (true) {
    const FetchResult r = fetcher.fetch(chain.hops.back(), agent);
    if (!r.ok()) {
      if (chain.hops.size() == 1) {
        throw Error(ErrorCode::kFetch, "cannot fetch " + url.str() + ": " + r.error);
      }
      chain.failed = true;
      return chain;
    }
    if (!r.is_redirect()) {
      chain.final_status = r.status;
      chain.landing_meta_refresh = r.body_meta_refresh;
      return chain;
    }
    NormalizedUrl next;
    try {
      next = normalize_url(resolve_reference(chain.hops.back(), r.location));
    } catch (const UrlParseError&) {
      chain.failed = true;
      return chain;
    }
    if (chain.hops.size() >= options.max_hops || !visited.insert(next.str()).second) {
      chain.truncated = true;
      return chain;
    }
    chain.statuses.push_back(r.status);
    chain.hops.push_back(std::move(next));
    if (std::chrono::steady_clock::now() >= deadline) {
      chain.failed = true;
      return chain;
    }
  }
}

// Mean edit distance between the string forms of consecutive hops.
inline double hop_levenshtein(const RedirectChain& chain) {
  require(!chain.hops.empty(), "redirect chain has no hops");
  if (chain.hops.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i < chain.hops.size(); ++i) {
    total += static_cast<double>(levenshtein(chain.hops[i - 1].str(), chain.hops[i].str()));
  }
  return total / static_cast<double>(chain.hops.size() - 1);
}

namespace detail {

inline std::optional<RedirectChain> try_trace(const NormalizedUrl& url, AgentProfile agent,
                                              const UrlFetcher& fetcher, const TraceOptions& options) {
  try {
    RedirectChain chain = trace_redirects(url, agent, fetcher, options);
    if (chain.failed) return std::nullopt;
    return chain;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

// 1 when browser and bot land on different registrable domains, 0 when
// they agree, -1 when either trace failed.
inline int detect_conditional_redirect(const std::optional<RedirectChain>& browser,
                                       const std::optional<RedirectChain>& bot) {
  if (!browser || !bot || browser->failed || bot->failed) return -1;
  return browser->landing().registrable_domain != bot->landing().registrable_domain ? 1 : 0;
}

inline int detect_conditional_redirect(const NormalizedUrl& url, const UrlFetcher& fetcher,
                                       const TraceOptions& options = {}) {
  return detect_conditional_redirect(detail::try_trace(url, AgentProfile::kBrowser, fetcher, options),
                                     detail::try_trace(url, AgentProfile::kBot, fetcher, options));
}

// ---------------------------------------------------------------------------
// URL feature group

struct UrlFeatureSet {
  double url_length = kMissing;
  double num_dots = kMissing;
  double num_subdomains = kMissing;
  double num_redirects = kMissing;
  double avg_hop_levenshtein = kMissing;
  double conditional_redirect = kMissing;

  static constexpr std::size_t kSize = 6;

  std::array<double, kSize> values() const {
    return {url_length, num_dots, num_subdomains, num_redirects, avg_hop_levenshtein,
            conditional_redirect};
  }

  static UrlFeatureSet missing() { return {}; }
};

// Builds the URL features from already-traced chains. `posted_length` is used
// only when the browser trace produced nothing.
inline UrlFeatureSet url_features(std::size_t posted_length,
                                  const std::optional<RedirectChain>& browser,
                                  const std::optional<RedirectChain>& bot) {
  UrlFeatureSet f;
  if (!browser) {
    f.url_length = static_cast<double>(posted_length);
    return f;
  }
  // A chain broken mid-way still yields lexical features for the furthest
  // hop reached; hop-derived slots are left missing.
  const NormalizedUrl& landing = browser->landing();
  const std::string expanded = landing.str();
  f.url_length = static_cast<double>(expanded.size());
  f.num_dots = static_cast<double>(std::count(expanded.begin(), expanded.end(), '.'));
  f.num_subdomains = static_cast<double>(subdomain_count(landing));
  if (!browser->failed) {
    f.num_redirects = static_cast<double>(browser->redirect_count());
    f.avg_hop_levenshtein = hop_levenshtein(*browser);
  }
  f.conditional_redirect = static_cast<double>(detect_conditional_redirect(browser, bot));
  return f;
}

inline UrlFeatureSet extract_f1(std::string_view posted_url, const UrlFetcher& fetcher,
                                const TraceOptions& options = {}) {
  const std::size_t posted_length = static_cast<std::size_t>(
      std::max(0L, text::code_point_count(text::trim(posted_url))));
  NormalizedUrl url;
  try {
    url = normalize_url(posted_url);
  } catch (const UrlParseError&) {
    return url_features(posted_length, std::nullopt, std::nullopt);
  }
  std::optional<RedirectChain> browser;
  try {
    browser = trace_redirects(url, AgentProfile::kBrowser, fetcher, options);
  } catch (const Error&) {
  }
  std::optional<RedirectChain> bot = detail::try_trace(url, AgentProfile::kBot, fetcher, options);
  return url_features(posted_length, browser, bot);
}

}  // namespace tweetguard
