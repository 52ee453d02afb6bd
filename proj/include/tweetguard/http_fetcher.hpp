#pragma once

#include <chrono>
#include <string>

#include "httplib.h"
#include "tweetguard/redirect.hpp"
#include "tweetguard/text.hpp"

namespace tweetguard {

// Live fetcher: one plain GET per hop, no cookie jar, redirects left to the
// tracer. Certificate errors are ignored since only the redirect structure
// matters.
class HttpFetcher : public UrlFetcher {
 public:
  explicit HttpFetcher(std::chrono::milliseconds timeout = std::chrono::milliseconds(3000))
      : timeout_(timeout) {}

  FetchResult fetch(const NormalizedUrl& url, AgentProfile agent) const override {
    const std::string origin = url.scheme + "://" + url.host + ":" + std::to_string(url.port);
    httplib::Client client(origin);
    client.set_follow_location(false);
    client.set_keep_alive(false);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    client.enable_server_certificate_verification(false);
    const httplib::Headers headers = {{"User-Agent", std::string(user_agent(agent))},
                                      {"Accept", "text/html,*/*"}};
    const std::string target = url.path + (url.query.empty() ? "" : "?" + url.query);
    const auto res = client.Get(target, headers);
    if (!res) {
      FetchResult failed;
      switch (res.error()) {
        case httplib::Error::ConnectionTimeout:
        case httplib::Error::Read:
          failed.failure = FetchFailure::kTimeout;
          break;
        case httplib::Error::Connection:
          failed.failure = FetchFailure::kConnect;
          break;
        default:
          failed.failure = FetchFailure::kProtocol;
          break;
      }
      failed.error = httplib::to_string(res.error());
      return failed;
    }
    FetchResult r;
    r.status = res->status;
    r.location = res->get_header_value("Location");
    r.body_meta_refresh = has_meta_refresh(res->body);
    return r;
  }

  static bool has_meta_refresh(const std::string& body) {
    const std::string lower = text::ascii_lower(body.substr(0, 64 * 1024));
    std::size_t pos = 0;
    while ((pos = lower.find("http-equiv", pos)) != std::string::npos) {
      const std::size_t end = lower.find('>', pos);
      const std::string tag = lower.substr(pos, end == std::string::npos ? 64 : end - pos);
      if (tag.find("refresh") != std::string::npos) return true;
      pos += 10;
    }
    return false;
  }

 private:
  std::chrono::milliseconds timeout_;
};

}  // namespace tweetguard
