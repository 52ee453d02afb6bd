#pragma once

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "tweetguard/error.hpp"
#include "tweetguard/redirect.hpp"
#include "tweetguard/text.hpp"
#include "tweetguard/time.hpp"

namespace tweetguard {

inline constexpr std::string_view kWhoisRootServer = "whois.iana.org";

struct WhoisRecord {
  std::string domain;
  std::optional<std::string> registrar;
  std::optional<Timestamp> created;
  std::optional<Timestamp> updated;
  std::optional<Timestamp> expires;
  std::string raw;
  std::string server;
};

class WhoisTransport {
 public:
  virtual ~WhoisTransport() = default;
  // Returns the raw response text. Throws Error(kWhoisQuery) when the server
  // cannot be reached.
  virtual std::string query(const std::string& server, const std::string& domain) const = 0;
};

// Plain TCP port-43 client.
class TcpWhoisTransport : public WhoisTransport {
 public:
  explicit TcpWhoisTransport(std::chrono::milliseconds timeout = std::chrono::seconds(3),
                             std::string port = "43")
      : timeout_(timeout), port_(std::move(port)) {}

  std::string query(const std::string& server, const std::string& domain) const override {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + timeout_;
    auto remaining_ms = [&] {
      const auto left =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      return static_cast<int>(std::max<long long>(0, left));
    };
    auto fail = [&](const std::string& what) -> std::string {
      throw Error(ErrorCode::kWhoisQuery, server + ": " + what);
    };

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(server.c_str(), port_.c_str(), &hints, &res) != 0 || res == nullptr) {
      return fail("cannot resolve host");
    }
    int fd = -1;
    for (addrinfo* ai = res; ai != nullptr && fd < 0; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL, 0) | O_NONBLOCK);
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      if (errno == EINPROGRESS) {
        pollfd p{fd, POLLOUT, 0};
        int err = 0;
        socklen_t len = sizeof(err);
        if (::poll(&p, 1, remaining_ms()) == 1 &&
            ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) == 0 && err == 0) {
          break;
        }
      }
      ::close(fd);
      fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0) return fail("connection failed");

    struct Closer {
      int fd;
      ~Closer() { ::close(fd); }
    } closer{fd};

    const std::string request = domain + "\r\n";
    std::size_t sent = 0;
    while (sent < request.size()) {
      pollfd p{fd, POLLOUT, 0};
      if (::poll(&p, 1, remaining_ms()) != 1) return fail("timed out sending query");
      const ssize_t n = ::send(fd, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EAGAIN || errno == EINTR) continue;
        return fail(std::string("send: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
    std::string out;
    std::array<char, 4096> buf{};
    for (;;) {
      pollfd p{fd, POLLIN, 0};
      if (::poll(&p, 1, remaining_ms()) != 1) return fail("timed out reading response");
      const ssize_t n = ::recv(fd, buf.data(), buf.size(), 0);
      if (n == 0) break;
      if (n < 0) {
        if (errno == EAGAIN || errno == EINTR) continue;
        return fail(std::string("recv: ") + std::strerror(errno));
      }
      out.append(buf.data(), static_cast<std::size_t>(n));
    }
    return out;
  }

 private:
  std::chrono::milliseconds timeout_;
  std::string port_;
};

// Replays canned responses. Root-server answers live at `<dir>/<domain>.txt`;
// answers from a referred server at `<dir>/<server>/<domain>.txt`.
class FixtureWhoisTransport : public WhoisTransport {
 public:
  explicit FixtureWhoisTransport(std::filesystem::path dir,
                                 std::chrono::milliseconds delay = std::chrono::milliseconds(0))
      : dir_(std::move(dir)), delay_(delay) {}

  void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

  std::string query(const std::string& server, const std::string& domain) const override {
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    const std::string name = text::ascii_lower(domain) + ".txt";
    const auto path = server == kWhoisRootServer ? dir_ / name : dir_ / server / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kWhoisQuery, server + ": no response for " + domain);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  std::filesystem::path dir_;
  std::chrono::milliseconds delay_;
};

namespace detail {

inline std::optional<int> month_from_abbrev(std::string_view m) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  if (m.size() < 3) return std::nullopt;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (text::iequals(m.substr(0, 3), kMonths[i])) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

// `dd-Mon-yyyy`, optionally followed by whitespace and anything else.
inline std::optional<Timestamp> parse_dd_mon_yyyy(std::string_view s) {
  s = text::trim(s);
  const std::size_t d1 = s.find('-');
  if (d1 == std::string_view::npos || d1 == 0 || d1 > 2) return std::nullopt;
  const std::size_t d2 = s.find('-', d1 + 1);
  if (d2 == std::string_view::npos || d2 - d1 - 1 != 3) return std::nullopt;
  if (s.size() < d2 + 5) return std::nullopt;
  if (s.size() > d2 + 5 && s[d2 + 5] != ' ' && s[d2 + 5] != '\t') return std::nullopt;
  int day = 0;
  for (std::size_t i = 0; i < d1; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    day = day * 10 + (s[i] - '0');
  }
  const auto month = month_from_abbrev(s.substr(d1 + 1, 3));
  if (!month) return std::nullopt;
  int year = 0;
  for (std::size_t i = d2 + 1; i < d2 + 5; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    year = year * 10 + (s[i] - '0');
  }
  return make_timestamp(year, *month, day, 0, 0, 0);
}

inline std::optional<Timestamp> parse_whois_date(std::string_view s) {
  s = text::trim(s);
  if (auto t = parse_iso8601(s)) return t;
  if (auto t = parse_dd_mon_yyyy(s)) return t;
  // Some registries print `2011-05-01T00:00:00.0Z` or append a zone name;
  // fall back to the leading date.
  if (s.size() >= 10) return parse_iso8601(s.substr(0, 10));
  return std::nullopt;
}

struct WhoisLine {
  std::string_view key;
  std::string_view value;
};

inline std::vector<WhoisLine> whois_lines(std::string_view raw) {
  std::vector<WhoisLine> out;
  std::size_t start = 0;
  while (start < raw.size()) {
    std::size_t end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = text::trim(raw.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line[0] == '%' || line[0] == '#' || line.starts_with(">>>")) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) continue;
    out.push_back({text::trim(line.substr(0, colon)), text::trim(line.substr(colon + 1))});
  }
  return out;
}

inline std::optional<std::string_view> first_value(const std::vector<WhoisLine>& lines,
                                                   std::initializer_list<std::string_view> keys) {
  for (const auto& key : keys) {
    for (const auto& line : lines) {
      if (!line.value.empty() && text::iequals(line.key, key)) return line.value;
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> referral_server(std::string_view raw) {
  const auto lines = whois_lines(raw);
  auto v = first_value(lines, {"refer", "whois"});
  if (!v) return std::nullopt;
  std::string server = text::ascii_lower(*v);
  // Occasionally written as a URL or with a port.
  if (auto p = server.find("://"); p != std::string::npos) server = server.substr(p + 3);
  if (auto p = server.find_first_of("/: \t"); p != std::string::npos) server.resize(p);
  if (server.empty()) return std::nullopt;
  return server;
}

}  // namespace detail

// Extracts registrar and dates from a raw response. Never throws.
inline WhoisRecord parse_whois(std::string_view raw) noexcept {
  WhoisRecord rec;
  try {
    rec.raw = std::string(raw);
    const auto lines = detail::whois_lines(raw);
    auto date = [&](std::initializer_list<std::string_view> keys) -> std::optional<Timestamp> {
      const auto v = detail::first_value(lines, keys);
      return v ? detail::parse_whois_date(*v) : std::nullopt;
    };
    rec.created = date({"Creation Date", "created", "Created On", "Registered on"});
    rec.updated = date({"Updated Date", "Last Updated On", "changed"});
    rec.expires = date({"Registry Expiry Date", "Expiration Date", "paid-till"});
    if (auto r = detail::first_value(lines, {"Registrar", "Sponsoring Registrar"})) {
      rec.registrar = std::string(*r);
    }
    if (auto d = detail::first_value(lines, {"Domain Name", "domain"})) {
      rec.domain = text::ascii_lower(*d);
    }
    if (rec.created && rec.expires && *rec.expires < *rec.created) rec.expires.reset();
    if (rec.updated && ((rec.created && *rec.updated < *rec.created) ||
                        (rec.expires && *rec.updated > *rec.expires))) {
      rec.updated.reset();
    }
  } catch (...) {
    // Only allocation failure can land here; the partial record stands.
  }
  return rec;
}

// Queries the root server, then follows up to `max_referrals` referrals and
// returns the deepest response that arrived.
inline WhoisRecord query_whois(const std::string& domain, const WhoisTransport& transport,
                               int max_referrals = 2) {
  std::string server(kWhoisRootServer);
  std::string raw = transport.query(server, domain);
  if (text::trim(raw).empty()) {
    throw Error(ErrorCode::kWhoisParse, server + ": empty response for " + domain);
  }
  std::string answered_by = server;
  for (int depth = 0; depth < max_referrals; ++depth) {
    const auto next = detail::referral_server(raw);
    if (!next || *next == answered_by) break;
    std::string deeper;
    try {
      deeper = transport.query(*next, domain);
    } catch (const Error&) {
      break;
    }
    if (text::trim(deeper).empty()) break;
    raw = std::move(deeper);
    answered_by = *next;
  }
  WhoisRecord rec = parse_whois(raw);
  rec.domain = text::ascii_lower(domain);
  rec.server = answered_by;
  return rec;
}

// Frequency encoding of registrar names, built from a training corpus.
class RegistrarTable {
 public:
  static std::string key(std::string_view name) { return text::ascii_lower(text::trim(name)); }

  void add(std::string_view name, long count = 1) { counts_[key(name)] += count; }

  double code(const std::optional<std::string>& name) const {
    if (!name) return kMissing;
    auto it = counts_.find(key(*name));
    return it == counts_.end() ? 0.0 : static_cast<double>(it->second);
  }

  const std::map<std::string, long>& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  nlohmann::json to_json() const { return nlohmann::json(counts_); }
  static RegistrarTable from_json(const nlohmann::json& j) {
    RegistrarTable t;
    if (!j.is_object()) throw Error(ErrorCode::kParse, "registrar table must be an object");
    for (const auto& [k, v] : j.items()) {
      if (!v.is_number_integer() || v.get<long>() < 0) {
        throw Error(ErrorCode::kParse, "registrar count for '" + k + "' must be a non-negative integer");
      }
      t.counts_[key(k)] = v.get<long>();
    }
    return t;
  }

  bool operator==(const RegistrarTable&) const = default;

 private:
  std::map<std::string, long> counts_;
};

struct WhoisFeatureSet {
  double registrar_code = kMissing;
  double ownership_period_days = kMissing;
  double domain_to_account_days = kMissing;

  static constexpr std::size_t kSize = 3;

  std::array<double, kSize> values() const {
    return {registrar_code, ownership_period_days, domain_to_account_days};
  }

  static WhoisFeatureSet missing() { return {}; }
};

inline WhoisFeatureSet extract_f2(const WhoisRecord& record, Timestamp account_created,
                                  Timestamp now, const RegistrarTable& registrars) {
  WhoisFeatureSet f;
  f.registrar_code = registrars.code(record.registrar);
  if (record.created) {
    const Timestamp end = record.expires ? *record.expires : now;
    f.ownership_period_days = std::max(0.0, days_between(*record.created, end));
    f.domain_to_account_days = std::max(0.0, days_between(*record.created, account_created));
  }
  return f;
}

// Thread-safe TTL cache in front of query_whois, keyed by registrable domain.
class WhoisCache {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit WhoisCache(std::chrono::seconds ttl = std::chrono::hours(24),
                      Clock clock = [] { return std::chrono::steady_clock::now(); })
      : ttl_(ttl), clock_(std::move(clock)) {}

  std::optional<WhoisRecord> get(const std::string& domain) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(domain);
    if (it == entries_.end()) return std::nullopt;
    if (clock_() - it->second.stored >= ttl_) {
      entries_.erase(it);
      return std::nullopt;
    }
    return it->second.record;
  }

  void put(const std::string& domain, WhoisRecord record) {
    std::lock_guard lock(mu_);
    entries_[domain] = Entry{std::move(record), clock_()};
  }

  WhoisRecord lookup(const std::string& domain, const WhoisTransport& transport) {
    if (auto hit = get(domain)) return *hit;
    WhoisRecord rec = query_whois(domain, transport);
    put(domain, rec);
    return rec;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  struct Entry {
    WhoisRecord record;
    std::chrono::steady_clock::time_point stored;
  };
  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Entry> entries_;
};

}  // namespace tweetguard
