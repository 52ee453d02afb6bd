#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tweetguard {

// Machine-parsable error categories. The CLI prints `error: <code>: <message>`
// and the HTTP service maps them onto status codes.
enum class ErrorCode {
  kIngest,
  kParse,
  kVersion,
  kContract,
  kTraining,
  kFetch,
  kWhoisQuery,
  kWhoisParse,
  kNotFound,
  kUnprocessable,
  kBadRequest,
  kNoLateBlacklisted,
  kStartup,
  kIo,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIngest: return "ingest";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kVersion: return "version";
    case ErrorCode::kContract: return "contract";
    case ErrorCode::kTraining: return "training";
    case ErrorCode::kFetch: return "fetch";
    case ErrorCode::kWhoisQuery: return "whois_query";
    case ErrorCode::kWhoisParse: return "whois_parse";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kUnprocessable: return "unprocessable";
    case ErrorCode::kBadRequest: return "bad_request";
    case ErrorCode::kNoLateBlacklisted: return "no_late_blacklisted";
    case ErrorCode::kStartup: return "startup";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by normalize_url; `index` is the offending character position in
// the raw input.
class UrlParseError : public Error {
 public:
  UrlParseError(std::size_t index, const std::string& message)
      : Error(ErrorCode::kParse,
              message + " at index " + std::to_string(index)),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kContract, message);
}

}  // namespace tweetguard
