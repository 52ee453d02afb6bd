#include <gtest/gtest.h>

#include <netinet/in.h>

#include <atomic>
#include <set>

#include "tweetguard/rng.hpp"
#include "tweetguard/whois.hpp"

namespace tweetguard {
namespace {

const std::filesystem::path kWhoisDir = std::filesystem::path(TWEETGUARD_FIXTURES) / "whois";

// Days since 1970-01-01 for a proleptic Gregorian date, by counting days in
// whole years and months.
long civil_days(int y, int m, int d) {
  auto leap = [](int yr) { return (yr % 4 == 0 && yr % 100 != 0) || yr % 400 == 0; };
  static const int kMonthDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  long days = 0;
  for (int yr = 1970; yr < y; ++yr) days += leap(yr) ? 366 : 365;
  for (int mo = 1; mo < m; ++mo) days += kMonthDays[mo - 1] + (mo == 2 && leap(y) ? 1 : 0);
  return days + d - 1;
}

TEST(DateOracleTest, FrozenEpochs) {
  EXPECT_EQ(civil_days(2011, 5, 1) * 86400L, 1304208000L);
  EXPECT_EQ(civil_days(2000, 3, 1), 11017L);
}

TEST(ParseWhoisTest, IsoCreationDate) {
  const auto rec = parse_whois("Creation Date: 2011-05-01T00:00:00Z\n");
  ASSERT_TRUE(rec.created.has_value());
  EXPECT_EQ(to_epoch(*rec.created), 1304208000L);
}

TEST(ParseWhoisTest, DayMonthYearFormMatchesIso) {
  const auto a = parse_whois("Creation Date: 2011-05-01T00:00:00Z\n");
  const auto b = parse_whois("created: 01-May-2011\n");
  ASSERT_TRUE(b.created.has_value());
  EXPECT_EQ(*a.created, *b.created);
  EXPECT_EQ(to_epoch(*b.created), civil_days(2011, 5, 1) * 86400L);
}

TEST(ParseWhoisTest, DayMonthYearAgainstOracleAcrossYears) {
  static const char* kMon[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const int y = 1985 + static_cast<int>(rng.below(50));
    const int m = 1 + static_cast<int>(rng.below(12));
    const int d = 1 + static_cast<int>(rng.below(28));
    char buf[32];
    std::snprintf(buf, sizeof buf, "paid-till: %02d-%s-%04d\n", d, kMon[m - 1], y);
    const auto rec = parse_whois(buf);
    ASSERT_TRUE(rec.expires.has_value()) << buf;
    EXPECT_EQ(to_epoch(*rec.expires), civil_days(y, m, d) * 86400L) << buf;
  }
}

TEST(ParseWhoisTest, SynonymsAndCaseInsensitiveKeys) {
  const auto rec = parse_whois(
      "SPONSORING REGISTRAR: Acme Names\n"
      "Created On: 2010-01-02\n"
      "Last Updated On: 2012-03-04\n"
      "Expiration Date: 2020-01-02\n");
  EXPECT_EQ(rec.registrar, "Acme Names");
  EXPECT_EQ(format_iso8601(*rec.created), "2010-01-02T00:00:00Z");
  EXPECT_EQ(format_iso8601(*rec.updated), "2012-03-04T00:00:00Z");
  EXPECT_EQ(format_iso8601(*rec.expires), "2020-01-02T00:00:00Z");
}

TEST(ParseWhoisTest, FirstSynonymWinsAndCommentsSkipped) {
  const auto rec = parse_whois(
      "% created: 1999-01-01\n"
      "registered on: 2005-06-07\n"
      "Creation Date: 2004-01-01\n");
  EXPECT_EQ(format_iso8601(*rec.created), "2004-01-01T00:00:00Z");
}

TEST(ParseWhoisTest, NoKnownKeysLeavesFieldsAbsent) {
  const std::string raw = "No match for \"NOPE.EXAMPLE\".\nfoo: bar\n";
  const auto rec = parse_whois(raw);
  EXPECT_FALSE(rec.registrar);
  EXPECT_FALSE(rec.created);
  EXPECT_FALSE(rec.updated);
  EXPECT_FALSE(rec.expires);
  EXPECT_EQ(rec.raw, raw);
}

TEST(ParseWhoisTest, UnparsableDateIsAbsent) {
  const auto rec = parse_whois("Creation Date: before the flood\nRegistrar: X\n");
  EXPECT_FALSE(rec.created);
  EXPECT_EQ(rec.registrar, "X");
}

TEST(ParseWhoisTest, DateOrderingInvariantHolds) {
  const auto rec = parse_whois(
      "Creation Date: 2010-01-01\nUpdated Date: 2030-01-01\nRegistry Expiry Date: 2020-01-01\n");
  EXPECT_TRUE(rec.created && rec.expires);
  EXPECT_FALSE(rec.updated);
}

TEST(ParseWhoisTest, FuzzNeverThrowsAndKeepsInvariant) {
  static const std::vector<std::string> kFragments = {
      "Creation Date:", "created:", "Updated Date:", "paid-till:", "Registrar:", "refer:",
      " 2011-05-01", "01-May-2011", "31-Feb-2011", "2011-13-01", "\n", "\r\n", ":", "%", "#",
      ">>>", "\xff\xfe", "\0", "T25:61:00Z", "+99:99", "-", "Z", "  ", "abc", "9999-99-99"};
  Rng rng(99);
  for (int i = 0; i < 3000; ++i) {
    std::string raw;
    const int parts = static_cast<int>(rng.below(30));
    for (int p = 0; p < parts; ++p) {
      if (rng.bernoulli(0.2)) {
        raw += static_cast<char>(rng.below(256));
      } else {
        raw += kFragments[rng.below(kFragments.size())];
      }
    }
    WhoisRecord rec;
    EXPECT_NO_THROW(rec = parse_whois(raw));
    EXPECT_EQ(rec.raw, raw);
    if (rec.created && rec.updated) {
      EXPECT_LE(*rec.created, *rec.updated);
    }
    if (rec.updated && rec.expires) {
      EXPECT_LE(*rec.updated, *rec.expires);
    }
    if (rec.created && rec.expires) {
      EXPECT_LE(*rec.created, *rec.expires);
    }
  }
}

TEST(QueryWhoisTest, FollowsReferral) {
  FixtureWhoisTransport transport(kWhoisDir);
  const auto rec = query_whois("shop.example", transport);
  EXPECT_EQ(rec.server, "whois.example-registry");
  EXPECT_EQ(rec.registrar, "Example Registrar, Inc.");
  EXPECT_EQ(to_epoch(*rec.created), 1304208000L);
  EXPECT_EQ(format_iso8601(*rec.updated), "2019-08-14T07:04:41Z");
  EXPECT_FALSE(rec.raw.empty());
}

TEST(QueryWhoisTest, ReferralDepthCappedAtTwo) {
  FixtureWhoisTransport transport(kWhoisDir);
  const auto rec = query_whois("deep.example", transport);
  EXPECT_EQ(rec.server, "whois.deep-two");
  EXPECT_EQ(rec.registrar, "Depth Two");
}

TEST(QueryWhoisTest, UnreachableReferralKeepsRootAnswer) {
  FixtureWhoisTransport transport(kWhoisDir);
  const auto rec = query_whois("lost.example", transport);
  EXPECT_EQ(rec.server, std::string(kWhoisRootServer));
  EXPECT_EQ(format_iso8601(*rec.created), "2015-02-03T00:00:00Z");
}

TEST(QueryWhoisTest, UnreachableIsQueryError) {
  FixtureWhoisTransport transport(kWhoisDir);
  try {
    query_whois("absent.example", transport);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWhoisQuery);
  }
}

TEST(QueryWhoisTest, EmptyResponseIsParseError) {
  FixtureWhoisTransport transport(kWhoisDir);
  try {
    query_whois("blank.example", transport);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWhoisParse);
  }
}

TEST(ExtractF2Test, OwnershipFromExpiry) {
  WhoisRecord rec;
  rec.created = *parse_iso8601("2011-01-01");
  rec.expires = *parse_iso8601("2012-01-01");
  const auto f = extract_f2(rec, *parse_iso8601("2011-06-01"), *parse_iso8601("2013-01-01"), {});
  EXPECT_EQ(f.ownership_period_days, 365.0);
  EXPECT_EQ(f.domain_to_account_days, 151.0);
  EXPECT_EQ(f.registrar_code, -1.0);
}

TEST(ExtractF2Test, OwnershipFallsBackToNow) {
  WhoisRecord rec;
  rec.created = *parse_iso8601("2011-01-01");
  const auto f = extract_f2(rec, *parse_iso8601("2011-01-01"), *parse_iso8601("2011-01-11"), {});
  EXPECT_EQ(f.ownership_period_days, 10.0);
  EXPECT_EQ(f.domain_to_account_days, 0.0);
}

TEST(ExtractF2Test, CreatedAbsentGivesSentinels) {
  WhoisRecord rec;
  rec.expires = *parse_iso8601("2012-01-01");
  rec.registrar = "Known";
  RegistrarTable table;
  table.add("known", 7);
  const auto f = extract_f2(rec, *parse_iso8601("2011-06-01"), *parse_iso8601("2013-01-01"), table);
  EXPECT_EQ(f.ownership_period_days, -1.0);
  EXPECT_EQ(f.domain_to_account_days, -1.0);
  EXPECT_EQ(f.registrar_code, 7.0);
}

TEST(ExtractF2Test, AccountOlderThanDomainClampsToZero) {
  WhoisRecord rec;
  rec.created = *parse_iso8601("2015-01-01");
  const auto f = extract_f2(rec, *parse_iso8601("2010-01-01"), *parse_iso8601("2016-01-01"), {});
  EXPECT_EQ(f.domain_to_account_days, 0.0);
}

TEST(ExtractF2Test, PureAndNonNegativeProperty) {
  Rng rng(3);
  RegistrarTable table;
  table.add("a", 3);
  table.add("b", 11);
  const std::vector<std::optional<std::string>> names = {std::nullopt, "a", "B ", "zzz"};
  for (int i = 0; i < 2000; ++i) {
    WhoisRecord rec;
    if (rng.bernoulli(0.8)) rec.created = from_epoch(static_cast<std::int64_t>(rng.below(2000000000)));
    if (rng.bernoulli(0.5)) rec.expires = from_epoch(static_cast<std::int64_t>(rng.below(2000000000)));
    rec.registrar = names[rng.below(names.size())];
    const Timestamp acct = from_epoch(static_cast<std::int64_t>(rng.below(2000000000)));
    const Timestamp now = from_epoch(static_cast<std::int64_t>(rng.below(2000000000)));
    const auto f1 = extract_f2(rec, acct, now, table);
    const auto f2 = extract_f2(rec, acct, now, table);
    EXPECT_EQ(f1.values(), f2.values());
    for (double v : f1.values()) EXPECT_TRUE(v >= 0.0 || v == -1.0);
  }
}

TEST(RegistrarTableTest, FrequencyEncodingRoundTrip) {
  RegistrarTable t;
  t.add("GoDaddy");
  t.add("godaddy ");
  t.add("Namecheap");
  EXPECT_EQ(t.code(std::string("GODADDY")), 2.0);
  EXPECT_EQ(t.code(std::string("unseen")), 0.0);
  EXPECT_EQ(t.code(std::nullopt), -1.0);
  EXPECT_EQ(RegistrarTable::from_json(t.to_json()), t);
  EXPECT_THROW(RegistrarTable::from_json(nlohmann::json::parse(R"({"x": -1})")), Error);
}

class CountingTransport : public WhoisTransport {
 public:
  explicit CountingTransport(const WhoisTransport& inner) : inner_(inner) {}
  std::string query(const std::string& server, const std::string& domain) const override {
    ++calls;
    return inner_.query(server, domain);
  }
  mutable std::atomic<int> calls{0};

 private:
  const WhoisTransport& inner_;
};

TEST(WhoisCacheTest, ExpiresAfterTtl) {
  FixtureWhoisTransport fixtures(kWhoisDir);
  CountingTransport transport(fixtures);
  auto now = std::chrono::steady_clock::time_point{};
  WhoisCache cache(std::chrono::hours(24), [&] { return now; });
  cache.lookup("shop.example", transport);
  const int after_first = transport.calls.load();
  cache.lookup("shop.example", transport);
  EXPECT_EQ(transport.calls.load(), after_first);
  now += std::chrono::hours(23);
  cache.lookup("shop.example", transport);
  EXPECT_EQ(transport.calls.load(), after_first);
  now += std::chrono::hours(1);
  cache.lookup("shop.example", transport);
  EXPECT_EQ(transport.calls.load(), 2 * after_first);
}

TEST(WhoisCacheTest, ConcurrentLookups) {
  FixtureWhoisTransport transport(kWhoisDir);
  WhoisCache cache;
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&, i] {
      for (int k = 0; k < 50; ++k) {
        const auto rec = cache.lookup((i + k) % 2 ? "shop.example" : "lost.example", transport);
        if (!rec.server.empty()) ++ok;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 800);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(TcpWhoisTransportTest, SendsDomainAndReadsToEof) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(listener, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  ASSERT_EQ(::listen(listener, 4), 0);
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const std::string port = std::to_string(ntohs(addr.sin_port));

  std::string received;
  std::thread server([&] {
    const int c = ::accept(listener, nullptr, nullptr);
    char buf[256];
    while (received.find("\r\n") == std::string::npos) {
      const ssize_t n = ::recv(c, buf, sizeof buf, 0);
      if (n <= 0) break;
      received.append(buf, static_cast<std::size_t>(n));
    }
    const std::string reply = "Domain Name: SHOP.EXAMPLE\r\nCreation Date: 2011-05-01T00:00:00Z\r\n";
    ::send(c, reply.data(), reply.size(), 0);
    ::close(c);
  });
  TcpWhoisTransport tcp(std::chrono::milliseconds(2000), port);
  const std::string raw = tcp.query("127.0.0.1", "shop.example");
  server.join();
  EXPECT_EQ(received, "shop.example\r\n");
  EXPECT_EQ(to_epoch(*parse_whois(raw).created), 1304208000L);

  // Accepts but never answers: times out as a query error.
  TcpWhoisTransport quick(std::chrono::milliseconds(200), port);
  try {
    quick.query("127.0.0.1", "shop.example");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWhoisQuery);
  }
  ::close(listener);
  try {
    quick.query("127.0.0.1", "shop.example");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWhoisQuery);
  }
}

}  // namespace
}  // namespace tweetguard
