#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tweetguard/error.hpp"
#include "tweetguard/text.hpp"

namespace tweetguard {

// Public-suffix rule set in the publicsuffix.org file format: one rule per
// line, `//` comments, `*.` wildcard rules and `!` exception rules. The
// prevailing rule for a host is an exception rule if one matches, else the
// rule with the most labels, else the implicit `*`.
class PublicSuffixList {
 public:
  static PublicSuffixList parse(std::string_view text) {
    PublicSuffixList list;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      std::string_view rule = text::trim(line);
      if (rule.empty() || rule.starts_with("//")) continue;
      // Rules end at the first whitespace.
      if (auto ws = rule.find_first_of(" \t"); ws != std::string_view::npos) {
        rule = rule.substr(0, ws);
      }
      if (rule.starts_with("!")) {
        list.exceptions_.insert(text::ascii_lower(rule.substr(1)));
      } else {
        list.rules_.insert(text::ascii_lower(rule));
      }
    }
    return list;
  }

  static PublicSuffixList from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot read public suffix list '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  static const PublicSuffixList& bundled();

  std::size_t size() const { return rules_.size() + exceptions_.size(); }

  // Number of trailing labels of `host` forming its public suffix.
  std::size_t suffix_label_count(std::string_view host) const {
    const std::vector<std::string_view> labels = split_labels(host);
    const std::size_t n = labels.size();
    std::size_t best = 1;  // implicit "*" rule
    for (std::size_t k = 1; k <= n; ++k) {
      const std::string candidate = join_tail(labels, k);
      if (exceptions_.contains(candidate)) return k - 1;
      if (rules_.contains(candidate)) best = std::max(best, k);
      // "*.<tail of k-1 labels>" matches any k-th label.
      if (k > 1 && rules_.contains("*." + join_tail(labels, k - 1))) best = std::max(best, k);
    }
    return std::min(best, n);
  }

  std::string public_suffix(std::string_view host) const {
    const auto labels = split_labels(host);
    return join_tail(labels, suffix_label_count(host));
  }

  // Public suffix plus one label. A host that is itself a public suffix (or
  // a single label) is its own registrable domain.
  std::string registrable_domain(std::string_view host) const {
    const auto labels = split_labels(host);
    const std::size_t suffix = suffix_label_count(host);
    if (labels.size() <= suffix) return std::string(host);
    return join_tail(labels, suffix + 1);
  }

 private:
  static std::vector<std::string_view> split_labels(std::string_view host) {
    std::vector<std::string_view> labels;
    std::size_t start = 0;
    while (start <= host.size()) {
      const std::size_t dot = host.find('.', start);
      if (dot == std::string_view::npos) {
        labels.push_back(host.substr(start));
        break;
      }
      labels.push_back(host.substr(start, dot - start));
      start = dot + 1;
    }
    return labels;
  }

  static std::string join_tail(const std::vector<std::string_view>& labels, std::size_t k) {
    std::string out;
    for (std::size_t i = labels.size() - k; i < labels.size(); ++i) {
      if (!out.empty()) out += '.';
      out += labels[i];
    }
    return out;
  }

  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> exceptions_;
};

}  // namespace tweetguard

#include "tweetguard/data/public_suffix_snapshot.hpp"

namespace tweetguard {

inline const PublicSuffixList& PublicSuffixList::bundled() {
  static const PublicSuffixList list = parse(data::kPublicSuffixSnapshot);
  return list;
}

}  // namespace tweetguard
