#pragma once

#include <string>
#include <string_view>

#include "tweetguard/error.hpp"
#include "tweetguard/time.hpp"

namespace tweetguard {

enum class VerdictStatus { kPhishing, kMalware, kSafe, kUnknown };

inline std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kPhishing: return "phishing";
    case VerdictStatus::kMalware: return "malware";
    case VerdictStatus::kSafe: return "safe";
    case VerdictStatus::kUnknown: return "unknown";
  }
  return "unknown";
}

inline VerdictStatus parse_verdict_status(std::string_view s) {
  if (s == "phishing") return VerdictStatus::kPhishing;
  if (s == "malware") return VerdictStatus::kMalware;
  if (s == "safe") return VerdictStatus::kSafe;
  if (s == "unknown") return VerdictStatus::kUnknown;
  throw Error(ErrorCode::kParse, "unknown blacklist status '" + std::string(s) + "'");
}

inline bool is_malicious(VerdictStatus s) {
  return s == VerdictStatus::kPhishing || s == VerdictStatus::kMalware;
}

struct BlacklistVerdict {
  std::string url;  // normalized
  VerdictStatus status = VerdictStatus::kUnknown;
  std::string source;
  Timestamp as_of{};

  bool operator==(const BlacklistVerdict&) const = default;
};

}  // namespace tweetguard
