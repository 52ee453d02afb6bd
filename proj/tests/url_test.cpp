#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "tweetguard/levenshtein.hpp"
#include "tweetguard/rng.hpp"
#include "tweetguard/url.hpp"

namespace tweetguard {
namespace {

TEST(NormalizeUrlTest, LowercasesHostAndDropsFragment) {
  const auto u = normalize_url("HTTP://Example.COM/a#frag");
  EXPECT_EQ(u.scheme, "http");
  EXPECT_EQ(u.host, "example.com");
  EXPECT_EQ(u.path, "/a");
  EXPECT_EQ(u.port, 80);
  EXPECT_EQ(u.str(), "http://example.com/a");
}

TEST(NormalizeUrlTest, DefaultsSchemeToHttp) {
  const auto u = normalize_url("bit.ly/x");
  EXPECT_EQ(u.scheme, "http");
  EXPECT_EQ(u.host, "bit.ly");
  EXPECT_EQ(u.path, "/x");
}

TEST(NormalizeUrlTest, RegistrableDomainUsesPublicSuffixSnapshot) {
  EXPECT_EQ(normalize_url("http://a.b.co.uk/").registrable_domain, "b.co.uk");
  EXPECT_EQ(normalize_url("http://www.example.com/").registrable_domain, "example.com");
  EXPECT_EQ(normalize_url("http://t.co/abc").registrable_domain, "t.co");
  EXPECT_EQ(normalize_url("http://login.secure.bank-verify.example/").registrable_domain,
            "bank-verify.example");
  EXPECT_EQ(normalize_url("http://10.0.0.1/x").registrable_domain, "10.0.0.1");
  EXPECT_EQ(normalize_url("http://co.uk/").registrable_domain, "co.uk");
}

TEST(PublicSuffixTest, WildcardAndExceptionRules) {
  const auto psl = PublicSuffixList::parse("com\n*.ck\n!www.ck\n// comment\nco.uk\n");
  EXPECT_EQ(psl.registrable_domain("a.b.foo.ck"), "b.foo.ck");
  EXPECT_EQ(psl.registrable_domain("www.ck"), "www.ck");
  EXPECT_EQ(psl.registrable_domain("x.www.ck"), "www.ck");
  EXPECT_EQ(psl.registrable_domain("a.b.co.uk"), "b.co.uk");
  // Unlisted TLDs fall back to the implicit "*" rule.
  EXPECT_EQ(psl.registrable_domain("a.b.zz"), "b.zz");
  EXPECT_EQ(psl.public_suffix("a.b.zz"), "zz");
}

TEST(NormalizeUrlTest, PortsUserinfoAndQuery) {
  const auto u = normalize_url("https://user:pw@Shop.Example.com:8443/p?q=1&r=2#x");
  EXPECT_EQ(u.host, "shop.example.com");
  EXPECT_EQ(u.port, 8443);
  EXPECT_EQ(u.query, "q=1&r=2");
  EXPECT_EQ(u.str(), "https://shop.example.com:8443/p?q=1&r=2");
  EXPECT_EQ(normalize_url("https://a.com:443").str(), "https://a.com/");
}

TEST(NormalizeUrlTest, InternationalHostIsPunycoded) {
  const auto u = normalize_url("http://b\xC3\xBC" "cher.example/");
  EXPECT_EQ(u.host, "xn--bcher-kva.example");
}

TEST(NormalizeUrlTest, ParseErrorsCarryIndex) {
  try {
    normalize_url("http://exa mple.com/");
    FAIL();
  } catch (const UrlParseError& e) {
    EXPECT_EQ(e.index(), 10u);
  }
  try {
    normalize_url("http://example.com:99x/");
    FAIL();
  } catch (const UrlParseError& e) {
    EXPECT_EQ(e.index(), 21u);
  }
  EXPECT_THROW(normalize_url(""), UrlParseError);
  EXPECT_THROW(normalize_url("ftp://example.com/"), UrlParseError);
  EXPECT_THROW(normalize_url("http:///path"), UrlParseError);
  EXPECT_THROW(normalize_url("http://a..b/"), UrlParseError);
}

TEST(NormalizeUrlTest, IdempotenceProperty) {
  Rng rng(7);
  const std::vector<std::string> hosts = {"Example.COM", "a.b.co.uk", "bit.ly", "xn--bcher-kva.example",
                                          "b\xC3\xBC" "cher.de", "10.1.2.3", "[::1]", "WWW.Evil.Example."};
  const std::string path_chars = "abcXYZ019-._~%/?=&:@!$'()*+,;#";
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    switch (rng.below(4)) {
      case 0: raw = "http://"; break;
      case 1: raw = "HTTPS://"; break;
      case 2: raw = "//"; break;
      default: break;
    }
    raw += hosts[rng.below(hosts.size())];
    if (rng.bernoulli(0.3)) raw += ":" + std::to_string(1 + rng.below(65535));
    if (rng.bernoulli(0.9)) raw += "/";
    const std::size_t len = rng.below(20);
    for (std::size_t k = 0; k < len; ++k) raw += path_chars[rng.below(path_chars.size())];
    if (rng.bernoulli(0.1)) raw += "\xC3\xA9";
    NormalizedUrl once;
    try {
      once = normalize_url(raw);
    } catch (const UrlParseError&) {
      continue;
    }
    const NormalizedUrl twice = normalize_url(once.str());
    ASSERT_EQ(once, twice) << raw;
    ASSERT_TRUE(once.host.ends_with(once.registrable_domain)) << raw;
    ++checked;
  }
  EXPECT_GT(checked, 1500);
}

TEST(ResolveReferenceTest, RelativeLocations) {
  const auto base = normalize_url("http://a.com/b/c/d?x=1");
  EXPECT_EQ(resolve_reference(base, "https://z.org/p"), "https://z.org/p");
  EXPECT_EQ(resolve_reference(base, "//cdn.a.com/x"), "http://cdn.a.com/x");
  EXPECT_EQ(resolve_reference(base, "/root"), "http://a.com/root");
  EXPECT_EQ(resolve_reference(base, "e"), "http://a.com/b/c/e");
  EXPECT_EQ(resolve_reference(base, "../e?y=2"), "http://a.com/b/e?y=2");
  EXPECT_EQ(resolve_reference(base, "./"), "http://a.com/b/c/");
  EXPECT_EQ(resolve_reference(base, "?q=2"), "http://a.com/b/c/d?q=2");
}

TEST(SubdomainCountTest, CountsLabelsLeftOfRegistrableDomain) {
  EXPECT_EQ(subdomain_count(normalize_url("http://login.secure.bank-verify.example/")), 2);
  EXPECT_EQ(subdomain_count(normalize_url("http://example.com/")), 0);
  EXPECT_EQ(subdomain_count(normalize_url("http://a.b.co.uk/")), 1);
}

// Independent oracle: the recursive definition of edit distance, memoized.
std::size_t edit_distance_oracle(const std::string& a, const std::string& b, std::size_t i,
                                 std::size_t j, std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
  if (i == 0) return j;
  if (j == 0) return i;
  if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
  const std::size_t best = std::min({edit_distance_oracle(a, b, i - 1, j, memo) + 1,
                                     edit_distance_oracle(a, b, i, j - 1, memo) + 1,
                                     edit_distance_oracle(a, b, i - 1, j - 1, memo) +
                                         (a[i - 1] == b[j - 1] ? 0 : 1)});
  memo[{i, j}] = best;
  return best;
}

std::size_t oracle(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  return edit_distance_oracle(a, b, a.size(), b.size(), memo);
}

TEST(LevenshteinTest, KnownValuesMatchOracle) {
  EXPECT_EQ(oracle("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("http://a.com/", "http://a.com/"), 0u);
}

TEST(LevenshteinTest, MetricProperties) {
  Rng rng(11);
  auto random_string = [&] {
    std::string s(rng.below(12), 'a');
    for (char& c : s) c = static_cast<char>('a' + rng.below(4));
    return s;
  };
  for (int i = 0; i < 300; ++i) {
    const std::string a = random_string(), b = random_string(), c = random_string();
    ASSERT_EQ(levenshtein(a, b), oracle(a, b));
    ASSERT_EQ(levenshtein(a, b), levenshtein(b, a));
    ASSERT_EQ(levenshtein(a, a), 0u);
    ASSERT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
  }
}

}  // namespace
}  // namespace tweetguard
