#include <gtest/gtest.h>

#include "tweetguard/http_fetcher.hpp"
#include "tweetguard/redirect.hpp"

namespace tweetguard {
namespace {

using Response = FixtureFetcher::Response;

Response redirect(int status, const std::string& to) {
  Response r;
  r.status = status;
  r.location = to;
  return r;
}

Response ok() { return Response{}; }

TEST(TraceRedirectsTest, FollowsChainToLanding) {
  FixtureFetcher f;
  f.set("http://a.example/", redirect(302, "http://b.example/"));
  f.set("http://b.example/", redirect(301, "http://c.example/"));
  f.set("http://c.example/", ok());
  const auto chain = trace_redirects(normalize_url("http://a.example/"), AgentProfile::kBrowser, f);
  ASSERT_EQ(chain.hops.size(), 3u);
  EXPECT_EQ(chain.landing().str(), "http://c.example/");
  EXPECT_EQ(chain.statuses, (std::vector<int>{302, 301}));
  EXPECT_EQ(chain.final_status, 200);
  EXPECT_EQ(chain.redirect_count(), 2);
  EXPECT_FALSE(chain.truncated);
  EXPECT_FALSE(chain.failed);
}

TEST(TraceRedirectsTest, SelfLoopIsTruncated) {
  FixtureFetcher f;
  f.set("http://a.example/", redirect(301, "http://a.example/"));
  const auto chain = trace_redirects(normalize_url("http://a.example/"), AgentProfile::kBrowser, f);
  EXPECT_EQ(chain.hops.size(), 1u);
  EXPECT_TRUE(chain.truncated);
  EXPECT_TRUE(chain.statuses.empty());
}

TEST(TraceRedirectsTest, HopCapTruncates) {
  FixtureFetcher f;
  for (int i = 0; i < 11; ++i) {
    f.set("http://h" + std::to_string(i) + ".example/",
          redirect(302, "http://h" + std::to_string(i + 1) + ".example/"));
  }
  f.set("http://h11.example/", ok());
  const auto chain = trace_redirects(normalize_url("http://h0.example/"), AgentProfile::kBrowser, f,
                                     TraceOptions{10, std::chrono::milliseconds(8000)});
  EXPECT_EQ(chain.hops.size(), 10u);
  EXPECT_EQ(chain.statuses.size(), 9u);
  EXPECT_TRUE(chain.truncated);
}

TEST(TraceRedirectsTest, RelativeLocationResolvedAgainstCurrentHop) {
  FixtureFetcher f;
  f.set("http://a.example/x/y", redirect(302, "../z?q=1"));
  f.set("http://a.example/z?q=1", ok());
  const auto chain = trace_redirects(normalize_url("http://a.example/x/y"), AgentProfile::kBrowser, f);
  ASSERT_EQ(chain.hops.size(), 2u);
  EXPECT_EQ(chain.landing().str(), "http://a.example/z?q=1");
}

TEST(TraceRedirectsTest, FirstHopFailureThrowsMidChainFailureFlags) {
  FixtureFetcher f;
  EXPECT_THROW(trace_redirects(normalize_url("http://nowhere.example/"), AgentProfile::kBrowser, f),
               Error);
  f.set("http://a.example/", redirect(302, "http://b.example/"));
  Response timeout;
  timeout.failure = FetchFailure::kTimeout;
  f.set("http://b.example/", timeout);
  const auto chain = trace_redirects(normalize_url("http://a.example/"), AgentProfile::kBrowser, f);
  EXPECT_TRUE(chain.failed);
  EXPECT_EQ(chain.hops.size(), 2u);
  EXPECT_EQ(chain.statuses.size(), chain.hops.size() - 1);
}

TEST(TraceRedirectsTest, DeterministicOnFixtures) {
  FixtureFetcher f;
  f.set("http://a.example/", redirect(302, "http://b.example/"));
  f.set("http://b.example/", ok());
  const auto u = normalize_url("http://a.example/");
  const auto c1 = trace_redirects(u, AgentProfile::kBot, f);
  const auto c2 = trace_redirects(u, AgentProfile::kBot, f);
  EXPECT_EQ(c1.hops, c2.hops);
  EXPECT_EQ(c1.statuses, c2.statuses);
}

TEST(ConditionalRedirectTest, DifferentLandingDomainsForBot) {
  FixtureFetcher f;
  f.set_for_agent("http://sh.example/1", AgentProfile::kBrowser, redirect(302, "http://phish.example/login"));
  f.set_for_agent("http://sh.example/1", AgentProfile::kBot, redirect(302, "http://www.google.com/"));
  f.set("http://phish.example/login", ok());
  f.set("http://www.google.com/", ok());
  EXPECT_EQ(detect_conditional_redirect(normalize_url("http://sh.example/1"), f), 1);
}

TEST(ConditionalRedirectTest, SameChainForBothProfilesIsZero) {
  FixtureFetcher f;
  f.set("http://sh.example/1", redirect(302, "http://land.example/a"));
  f.set("http://land.example/a", ok());
  EXPECT_EQ(detect_conditional_redirect(normalize_url("http://sh.example/1"), f), 0);
}

TEST(ConditionalRedirectTest, SameRegistrableDomainIsZero) {
  FixtureFetcher f;
  f.set_for_agent("http://sh.example/1", AgentProfile::kBot, redirect(302, "http://m.land.example/"));
  f.set_for_agent("http://sh.example/1", AgentProfile::kBrowser, redirect(302, "http://www.land.example/"));
  f.set("http://m.land.example/", ok());
  f.set("http://www.land.example/", ok());
  EXPECT_EQ(detect_conditional_redirect(normalize_url("http://sh.example/1"), f), 0);
}

TEST(ConditionalRedirectTest, BotTimeoutIsMissing) {
  FixtureFetcher f;
  f.set("http://sh.example/1", redirect(302, "http://land.example/a"));
  f.set("http://land.example/a", ok());
  Response timeout;
  timeout.failure = FetchFailure::kTimeout;
  f.set_for_agent("http://sh.example/1", AgentProfile::kBot, timeout);
  EXPECT_EQ(detect_conditional_redirect(normalize_url("http://sh.example/1"), f), -1);
}

TEST(HopLevenshteinTest, Examples) {
  RedirectChain single;
  single.hops = {normalize_url("http://x.example/")};
  EXPECT_EQ(hop_levenshtein(single), 0.0);
  RedirectChain same;
  same.hops = {normalize_url("http://a.com/"), normalize_url("http://a.com/")};
  EXPECT_EQ(hop_levenshtein(same), 0.0);
  RedirectChain three;
  three.hops = {normalize_url("http://a.com/"), normalize_url("http://b.com/"),
                normalize_url("http://b.com/xyz")};
  EXPECT_DOUBLE_EQ(hop_levenshtein(three), (1.0 + 3.0) / 2.0);
  EXPECT_THROW(hop_levenshtein(RedirectChain{}), Error);
}

TEST(ExtractF1Test, DirectUrlLexicalCounts) {
  FixtureFetcher f;
  f.set("http://login.secure.bank-verify.example/a.b", ok());
  const auto feats = extract_f1("http://login.secure.bank-verify.example/a.b", f);
  EXPECT_EQ(feats.url_length, 43.0);
  EXPECT_EQ(feats.num_dots, 4.0);
  EXPECT_EQ(feats.num_subdomains, 2.0);
  EXPECT_EQ(feats.num_redirects, 0.0);
  EXPECT_EQ(feats.avg_hop_levenshtein, 0.0);
  EXPECT_EQ(feats.conditional_redirect, 0.0);
}

TEST(ExtractF1Test, ShortUrlThroughThreeHops) {
  FixtureFetcher f;
  f.set("http://bit.ly/x", redirect(301, "http://t.co/y"));
  f.set("http://t.co/y", redirect(302, "http://track.example/z"));
  f.set("http://track.example/z", redirect(302, "http://landing.example/page"));
  f.set("http://landing.example/page", ok());
  const auto feats = extract_f1("bit.ly/x", f);
  EXPECT_EQ(feats.num_redirects, 3.0);
  EXPECT_EQ(feats.url_length, static_cast<double>(std::string("http://landing.example/page").size()));
  EXPECT_GT(feats.avg_hop_levenshtein, 0.0);
}

TEST(ExtractF1Test, UnreachableUrlDegradesToSentinels) {
  FixtureFetcher f;
  const auto feats = extract_f1("http://gone.example/abc", f);
  EXPECT_EQ(feats.url_length, 23.0);
  EXPECT_EQ(feats.num_dots, -1.0);
  EXPECT_EQ(feats.num_subdomains, -1.0);
  EXPECT_EQ(feats.num_redirects, -1.0);
  EXPECT_EQ(feats.avg_hop_levenshtein, -1.0);
  EXPECT_EQ(feats.conditional_redirect, -1.0);
}

TEST(FixtureFetcherTest, LoadsJsonMapWithAgentOverrides) {
  const auto doc = nlohmann::json::parse(R"({
    "http://S.example/a": {"status": 302, "location": "http://land.example/", "agents": {"bot": {"location": "http://google.com/"}}},
    "http://land.example/": {"status": 200, "body_meta_refresh": true},
    "http://google.com/": {"status": 200},
    "http://down.example/": {"error": "timeout"}
  })");
  const auto f = FixtureFetcher::from_json(doc);
  const auto browser = trace_redirects(normalize_url("http://s.example/a"), AgentProfile::kBrowser, f);
  EXPECT_EQ(browser.landing().host, "land.example");
  EXPECT_TRUE(browser.landing_meta_refresh);
  const auto bot = trace_redirects(normalize_url("http://s.example/a"), AgentProfile::kBot, f);
  EXPECT_EQ(bot.landing().host, "google.com");
  EXPECT_EQ(f.fetch(normalize_url("http://down.example/"), AgentProfile::kBot).failure,
            FetchFailure::kTimeout);
  EXPECT_THROW(FixtureFetcher::from_json(nlohmann::json::parse(R"({"http://a/": {"error": "boom"}})")),
               Error);
}

TEST(HttpFetcherTest, MetaRefreshDetection) {
  EXPECT_TRUE(HttpFetcher::has_meta_refresh(R"(<META HTTP-EQUIV="Refresh" content="0;url=x">)"));
  EXPECT_FALSE(HttpFetcher::has_meta_refresh("<meta http-equiv=\"content-type\">"));
}

TEST(HttpFetcherTest, LiveFetchAgainstLocalServerDoesNotFollowRedirects) {
  httplib::Server server;
  std::string seen_agent;
  server.Get("/start", [&](const httplib::Request& req, httplib::Response& res) {
    seen_agent = req.get_header_value("User-Agent");
    res.status = 302;
    res.set_header("Location", "/next");
  });
  server.Get("/next", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html><meta http-equiv='refresh' content='1'></html>", "text/html");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  HttpFetcher fetcher(std::chrono::milliseconds(2000));
  const auto start = normalize_url("http://127.0.0.1:" + std::to_string(port) + "/start");
  const auto first = fetcher.fetch(start, AgentProfile::kBot);
  EXPECT_TRUE(first.ok());
  EXPECT_EQ(first.status, 302);
  EXPECT_EQ(first.location, "/next");
  EXPECT_NE(seen_agent.find("Googlebot"), std::string::npos);
  const auto chain = trace_redirects(start, AgentProfile::kBrowser, fetcher);
  EXPECT_EQ(chain.hops.size(), 2u);
  EXPECT_TRUE(chain.landing_meta_refresh);
  server.stop();
  t.join();
  const auto refused = fetcher.fetch(start, AgentProfile::kBrowser);
  EXPECT_FALSE(refused.ok());
}

}  // namespace
}  // namespace tweetguard
