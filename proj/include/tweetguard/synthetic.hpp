#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include "tweetguard/features.hpp"
#include "tweetguard/ml/dataset.hpp"
#include "tweetguard/rng.hpp"

namespace tweetguard {

// Frozen generator for desk-scale experiments. Changing any constant here
// changes every downstream number, so treat it as versioned data.
inline constexpr std::string_view kSyntheticGeneratorVersion = "synthetic-v1";

// Label-independent column.
inline constexpr std::string_view kSyntheticNoiseFeature = "retweet_count";

// The three strongest planted effects, strongest first.
inline constexpr std::array<std::string_view, 3> kSyntheticTopSignals = {
    "account_age_days", "ownership_period_days", "conditional_redirect"};

// Per row, with p = label (1 phishing) and s = separability:
//   sh = s*p drives URL and WHOIS slots.
//   With probability 0.12 the account behaves like the other class, and
//   ss = s*(1-p) instead of s*p drives tweet and network slots.
//   sub  = max(0, round(N(0.8+0.7sh, 0.8)))      num_subdomains
//   dots = sub + 1 + max(0, round(N(1+0.5sh, 0.8)))
//   red  = max(0, round(N(0.7+sh, 0.9)))         num_redirects
//   len  = max(12, round(N(48+10sh, 14)))
//   lev  = red == 0 ? 0 : max(0, N(18+8sh, 7))
//   cr   = Bernoulli(0.05+0.55sh)
//   (red, lev, cr) all -1 with probability 0.03
//   registrar code: with probability 0.1+0.6sh one of {9,40,95,230},
//     else one of {4,20,60,150,400}
//   own  = LogN(ln 2500 - 1.8sh, 0.9), d2a = LogN(ln 1500 - 0.8sh, 1.2),
//     both -1 with probability 0.05
//   ht = Poisson(0.8+ss), me = Poisson(0.5+ss), tr = Binomial(ht, 0.15+0.45ss)
//   rt = floor(LogN(1, 1.5))                       pure noise
//   tl = clip(round(N(80+18ss, 25)), 20, 140)
//   pos = ht == 0 ? -1 : U{0 .. max(1, floor(tl/(1+ss)))-1}
//   fo = floor(LogN(ln 300 - 0.9ss, 2.2-1.2ss)), fe = floor(LogN(ln 250 + 0.9ss, 1))
//   ratio = fo / max(fe, 1), li = Bernoulli(0.5-0.3ss)
//   age = LogN(ln 800 - 1.8sh, 0.9), de = Bernoulli(0.85-0.35ss)
//   st = floor(LogN(ln 2000 + 0.6ss, 2-ss))
// Classes are balanced (n/2 phishing) and shuffled.
inline ml::Dataset generate_synthetic_corpus(std::size_t n, double separability, std::uint64_t rng_seed) {
  require(n >= 100, "synthetic corpus needs n >= 100");
  require(separability >= 0.0 && separability <= 1.0, "separability must be in [0, 1]");
  Rng rng(rng_seed);
  std::vector<std::uint8_t> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<long>(n / 2), 1);
  rng.shuffle(std::span<std::uint8_t>(labels));

  static constexpr std::array<double, 4> kRogue = {9, 40, 95, 230};
  static constexpr std::array<double, 5> kOrdinary = {4, 20, 60, 150, 400};
  const double s = separability;

  ml::Dataset data;
  data.feature_names = feature_names();
  data.x.reserve(n * kFeatureCount);
  data.y.reserve(n);
  std::array<double, kFeatureCount> v{};
  for (std::size_t i = 0; i < n; ++i) {
    const int p = labels[i];
    int social = p;
    if (rng.uniform() < 0.12) social = 1 - p;
    const double sh = s * p;
    const double ss = s * social;

    const double sub = std::max(0.0, std::round(rng.normal(0.8 + 0.7 * sh, 0.8)));
    const double dots = sub + 1.0 + std::max(0.0, std::round(rng.normal(1.0 + 0.5 * sh, 0.8)));
    double red = std::max(0.0, std::round(rng.normal(0.7 + 1.0 * sh, 0.9)));
    const double len = std::max(12.0, std::round(rng.normal(48.0 + 10.0 * sh, 14.0)));
    double lev = red == 0.0 ? 0.0 : std::max(0.0, rng.normal(18.0 + 8.0 * sh, 7.0));
    double cr = rng.uniform() < 0.05 + 0.55 * sh ? 1.0 : 0.0;
    if (rng.uniform() < 0.03) red = lev = cr = kMissing;

    const bool rogue = rng.uniform() < 0.1 + 0.6 * sh;
    const double reg = rogue ? kRogue[rng.below(kRogue.size())] : kOrdinary[rng.below(kOrdinary.size())];
    double own = rng.lognormal(std::log(2500.0) - 1.8 * sh, 0.9);
    const double age = rng.lognormal(std::log(800.0) - 1.8 * sh, 0.9);
    double d2a = rng.lognormal(std::log(1500.0) - 0.8 * sh, 1.2);
    if (rng.uniform() < 0.05) own = d2a = kMissing;

    const int ht = rng.poisson(0.8 + 1.0 * ss);
    const int me = rng.poisson(0.5 + 1.0 * ss);
    const int tr = ht > 0 ? rng.binomial(ht, 0.15 + 0.45 * ss) : 0;
    const double rt = std::floor(rng.lognormal(1.0, 1.5));
    const double tl = std::clamp(std::round(rng.normal(80.0 + 18.0 * ss, 25.0)), 20.0, 140.0);
    double pos = kMissing;
    if (ht > 0) {
      const auto span = static_cast<std::uint64_t>(std::max(1.0, std::floor(tl / (1.0 + ss))));
      pos = static_cast<double>(rng.below(span));
    }
    const double fo = std::floor(rng.lognormal(std::log(300.0) - 0.9 * ss, 2.2 - 1.2 * ss));
    const double fe = std::floor(rng.lognormal(std::log(250.0) + 0.9 * ss, 1.0));
    const double ratio = fo / std::max(fe, 1.0);
    const double li = rng.uniform() < 0.5 - 0.3 * ss ? 1.0 : 0.0;
    const double de = rng.uniform() < 0.85 - 0.35 * ss ? 1.0 : 0.0;
    const double st = std::floor(rng.lognormal(std::log(2000.0) + 0.6 * ss, 2.0 - 1.0 * ss));

    v = {len, dots, sub, red, lev, cr, reg, own, d2a, static_cast<double>(ht), static_cast<double>(me),
         static_cast<double>(tr), rt, tl, pos, fo, fe, ratio, li, age, de, st};
    data.add(v, p);
  }
  return data;
}

}  // namespace tweetguard
