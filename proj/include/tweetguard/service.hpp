#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "tweetguard/corpus.hpp"
#include "tweetguard/error.hpp"
#include "tweetguard/ml/model.hpp"
#include "tweetguard/pipeline.hpp"

namespace tweetguard {

// Resolves tweet ids to full tweets, author profile included.
class TweetProvider {
 public:
  virtual ~TweetProvider() = default;
  virtual std::optional<Tweet> find(const std::string& id) const = 0;
};

// Read-only store loaded from a JSONL file of tweet records.
class JsonlTweetProvider : public TweetProvider {
 public:
  JsonlTweetProvider() = default;

  void add(Tweet t) {
    const std::string id = t.id;
    tweets_.insert_or_assign(id, std::move(t));
  }

  std::optional<Tweet> find(const std::string& id) const override {
    auto it = tweets_.find(id);
    if (it == tweets_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return tweets_.size(); }

  static JsonlTweetProvider parse(std::istream& in, const std::string& origin = "tweets") {
    JsonlTweetProvider p;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      try {
        p.add(tweet_from_record(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, origin + ":" + std::to_string(line_no) + ": " + e.what());
      } catch (const Error& e) {
        throw Error(ErrorCode::kParse, origin + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    return p;
  }

  static JsonlTweetProvider from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot read tweet store " + path.string());
    return parse(in, path.string());
  }

 private:
  std::unordered_map<std::string, Tweet> tweets_;
};

// Placeholder for a social-network API client.
class LiveTweetProvider : public TweetProvider {
 public:
  std::optional<Tweet> find(const std::string& id) const override {
    throw Error(ErrorCode::kFetch, "live tweet lookup is not available; cannot resolve " + id);
  }
};

struct ClassifyRequest {
  std::optional<std::string> tweet_id;
  std::optional<Tweet> tweet;
  bool debug = false;

  static ClassifyRequest from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::kBadRequest, "request body must be a JSON object");
    ClassifyRequest r;
    const bool has_id = j.contains("tweet_id");
    const bool has_tweet = j.contains("tweet");
    if (has_id == has_tweet) {
      throw Error(ErrorCode::kBadRequest, "request needs exactly one of 'tweet_id' and 'tweet'");
    }
    if (has_id) {
      const auto& id = j["tweet_id"];
      if (!id.is_string() || id.get<std::string>().empty()) {
        throw Error(ErrorCode::kBadRequest, "'tweet_id' must be a non-empty string");
      }
      r.tweet_id = id.get<std::string>();
    } else {
      try {
        r.tweet = tweet_from_record(j["tweet"]);
      } catch (const Error& e) {
        throw Error(ErrorCode::kBadRequest, std::string("invalid tweet: ") + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kBadRequest, std::string("invalid tweet: ") + e.what());
      }
    }
    if (auto it = j.find("debug"); it != j.end()) {
      if (!it->is_boolean()) throw Error(ErrorCode::kBadRequest, "'debug' must be a boolean");
      r.debug = it->get<bool>();
    }
    return r;
  }

  static ClassifyRequest parse(std::string_view body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kBadRequest, std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
  }
};

struct ClassifyResponse {
  LabelValue verdict = LabelValue::kSafe;
  double score = 0.0;
  bool partial = false;
  long latency_ms = 0;
  std::optional<FeatureVector> feature_vector;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(verdict);
    j["score"] = score;
    j["partial"] = partial;
    j["latency_ms"] = latency_ms;
    if (feature_vector) {
      nlohmann::ordered_json fv = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < kFeatureCount; ++i) fv[std::string(kFeatureNames[i])] = feature_vector->values[i];
      j["feature_vector"] = std::move(fv);
    }
    return j;
  }
};

// `provider` may be null when only inline tweets are expected.
inline ClassifyResponse classify_tweet(const ClassifyRequest& request, const ml::TrainedModel& model,
                                       const Extractors& extractors, const TweetProvider* provider,
                                       const GroupTimeouts& timeouts = {},
                                       ExtractionMode mode = ExtractionMode::kConcurrent) {
  const auto start = std::chrono::steady_clock::now();
  require(model.dim() == kFeatureCount, "the service needs a model over all 22 features");
  Tweet tweet;
  if (request.tweet) {
    tweet = *request.tweet;
  } else {
    require(request.tweet_id.has_value(), "request has neither tweet nor tweet_id");
    if (provider == nullptr) throw Error(ErrorCode::kNotFound, "no tweet store configured");
    auto found = provider->find(*request.tweet_id);
    if (!found) throw Error(ErrorCode::kNotFound, "unknown tweet_id " + *request.tweet_id);
    tweet = std::move(*found);
  }
  if (tweet.urls.empty()) throw Error(ErrorCode::kUnprocessable, "tweet " + tweet.id + " contains no URL");

  const ExtractionResult ext = extract_features(tweet, extractors, model.registrar_freq_table, timeouts, mode);
  const ml::Prediction p = ml::predict(model, ext.vector);
  ClassifyResponse r;
  r.verdict = p.label;
  r.score = p.score;
  r.partial = ext.partial();
  if (request.debug) r.feature_vector = ext.vector;
  r.latency_ms = static_cast<long>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
  return r;
}

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadRequest:
    case ErrorCode::kParse: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kUnprocessable: return 422;
    default: return 500;
  }
}

inline std::string error_body(ErrorCode code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", std::string(error_code_name(code))}, {"message", std::string(message)}};
  return j.dump();
}

// 64-bit FNV-1a, used to fingerprint the loaded model.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string model_version(const ml::TrainedModel& model) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(ml::model_to_json(model).dump())));
  return std::string(ml::to_string(model.algorithm)) + "-" + buf;
}

struct ServiceConfig {
  std::shared_ptr<const ml::TrainedModel> model;
  Extractors extractors;
  std::shared_ptr<const TweetProvider> provider;
  GroupTimeouts timeouts;
  ExtractionMode mode = ExtractionMode::kConcurrent;
  std::string cors_origin = "*";
  std::size_t worker_threads = 64;
};

class Service {
 public:
  explicit Service(ServiceConfig config)
      : config_(std::move(config)), started_(std::chrono::steady_clock::now()) {
    require(config_.model != nullptr, "service needs a model");
    config_.extractors.check();
    version_ = model_version(*config_.model);
    routes();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ~Service() { stop(); }

  const std::string& version() const { return version_; }

  nlohmann::ordered_json health() const {
    nlohmann::ordered_json j;
    j["status"] = "ok";
    j["model_version"] = version_;
    j["uptime_s"] = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - started_)
                        .count();
    return j;
  }

  // Status code and JSON body for a classify request body.
  std::pair<int, std::string> handle_classify(std::string_view body) const {
    try {
      const auto request = ClassifyRequest::parse(body);
      const auto response = classify_tweet(request, *config_.model, config_.extractors, config_.provider.get(),
                                           config_.timeouts, config_.mode);
      return {200, response.to_json().dump()};
    } catch (const Error& e) {
      return {http_status(e.code()), error_body(e.code(), e.what())};
    } catch (const std::exception& e) {
      return {500, error_body(ErrorCode::kContract, e.what())};
    }
  }

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host, int port) {
    require(!thread_.joinable(), "service already started");
    int bound = port;
    if (port == 0) {
      bound = server_.bind_to_any_port(host);
      if (bound < 0) throw Error(ErrorCode::kStartup, "cannot bind " + host);
    } else if (!server_.bind_to_port(host, port)) {
      throw Error(ErrorCode::kStartup, "cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return bound;
  }

  // Blocks until stop() is called from elsewhere or the process ends.
  void run(const std::string& host, int port) {
    if (!server_.bind_to_port(host, port)) {
      throw Error(ErrorCode::kStartup, "cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
    }
    server_.listen_after_bind();
  }

  void stop() {
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  void routes() {
    const std::size_t workers = config_.worker_threads;
    server_.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    server_.set_payload_max_length(1 << 20);
    // The library default also sets SO_REUSEPORT, which would let a second
    // instance bind a busy port.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });
    server_.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"},
                                 {"Vary", "Origin"}});
    server_.Post("/v1/classify", [this](const httplib::Request& req, httplib::Response& res) {
      auto [status, body] = handle_classify(req.body);
      res.status = status;
      res.set_content(body, "application/json");
    });
    server_.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(health().dump(), "application/json");
    });
    server_.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Max-Age", "600");
    });
    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        if (ep) std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      res.status = 500;
      res.set_content(error_body(ErrorCode::kContract, what), "application/json");
    });
  }

  ServiceConfig config_;
  std::chrono::steady_clock::time_point started_;
  std::string version_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace tweetguard
