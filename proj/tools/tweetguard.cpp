// tweetguard command-line interface.
//
// Exit codes: 0 success (or "safe" for classify), 2 "phishing" for classify,
// 1 on any error. Errors are printed as one line: `error: <code>: <message>`.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tweetguard/tweetguard.hpp"

namespace tg = tweetguard;
using tg::Error;
using tg::ErrorCode;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPhishing = 2;

void print_json(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<tg::BlacklistStore> load_blacklists(const std::vector<std::string>& paths) {
  std::vector<tg::BlacklistStore> out;
  for (const auto& p : paths) out.push_back(tg::BlacklistStore::from_file(p));
  return out;
}

struct ExtractorFlags {
  std::string fixtures;
  std::string trends;
  bool live = false;
  bool sequential = false;

  void add_to(CLI::App* cmd, bool trends_flag = true) {
    cmd->add_option("--fixtures", fixtures, "Fixture directory (http.json, whois/, trends.json)");
    if (trends_flag) cmd->add_option("--trends", trends, "Trending-hashtag file (overrides the fixture one)");
    cmd->add_flag("--live", live, "Use real HTTP and WHOIS instead of fixtures");
    cmd->add_flag("--sequential", sequential, "Run the feature groups one after another");
  }

  tg::Extractors build() const {
    if (live == !fixtures.empty()) {
      throw Error(ErrorCode::kBadRequest, "choose exactly one of --fixtures <dir> and --live");
    }
    tg::Extractors ex;
    if (live) {
      ex.fetcher = std::make_shared<tg::HttpFetcher>();
      ex.whois = std::make_shared<tg::TcpWhoisTransport>();
      ex.whois_cache = std::make_shared<tg::WhoisCache>();
      ex.trends = std::make_shared<tg::TrendingContext>();
    } else {
      ex = tg::load_fixture_extractors(fixtures);
    }
    if (!trends.empty()) ex.trends = std::make_shared<tg::TrendingContext>(tg::TrendingContext::from_file(trends));
    return ex;
  }

  tg::ExtractionMode mode() const {
    return sequential ? tg::ExtractionMode::kSequential : tg::ExtractionMode::kConcurrent;
  }
};

struct TrainFlags {
  std::string algo = "rf";
  std::string weights = "balanced";
  int trees = 100;
  int max_depth = -1;
  int min_split = 2;
  int max_features = -1;
  unsigned threads = 0;

  void add_to(CLI::App* cmd, bool algo_flag = true) {
    if (algo_flag) cmd->add_option("--algo", algo, "nb | dt | rf")->capture_default_str();
    cmd->add_option("--weights", weights, "balanced | uniform | <phishing>,<safe>")->capture_default_str();
    cmd->add_option("--trees", trees, "Forest size")->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "Tree depth limit (-1: none)")->capture_default_str();
    cmd->add_option("--min-samples-split", min_split, "Smallest node that may split")->capture_default_str();
    cmd->add_option("--max-features", max_features, "Features tried per split (-1: ceil(sqrt(d)))")
        ->capture_default_str();
    cmd->add_option("--threads", threads, "Training threads (0: all cores)");
  }

  tg::ml::TrainParams params() const { return params_for(tg::ml::parse_algorithm(algo)); }

  tg::ml::TrainParams params_for(tg::ml::Algorithm a) const {
    tg::ml::TrainParams p;
    p.algorithm = a;
    p.n_trees = trees;
    p.max_depth = max_depth;
    p.min_samples_split = min_split;
    p.max_features = max_features;
    p.threads = threads;
    if (weights == "balanced") {
      p.weight_mode = tg::ml::WeightMode::kBalanced;
    } else if (weights == "uniform") {
      p.weight_mode = tg::ml::WeightMode::kUniform;
    } else {
      const auto comma = weights.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::kBadRequest, "bad --weights '" + weights + "'");
      try {
        p.custom_weights = {std::stod(weights.substr(0, comma)), std::stod(weights.substr(comma + 1))};
      } catch (const std::exception&) {
        throw Error(ErrorCode::kBadRequest, "bad --weights '" + weights + "'");
      }
      p.weight_mode = tg::ml::WeightMode::kCustom;
    }
    if (p.n_trees < 1) throw Error(ErrorCode::kBadRequest, "--trees must be at least 1");
    return p;
  }
};

nlohmann::ordered_json to_ordered(const nlohmann::json& j) { return nlohmann::ordered_json::parse(j.dump()); }

// --- ingest ---------------------------------------------------------------

int cmd_ingest(const std::string& in, const std::string& out, bool keep_text_dupes, bool json) {
  const auto result = tg::ingest_stream(in, !keep_text_dupes);
  tg::persist(result.corpus, out);
  const auto& s = result.stats;
  if (json) {
    nlohmann::ordered_json j;
    j["lines"] = s.lines;
    j["admitted"] = s.admitted;
    j["skipped"] = {{"malformed", s.skipped_malformed},       {"no_url", s.skipped_no_url},
                    {"too_long", s.skipped_too_long},         {"duplicate_id", s.skipped_duplicate_id},
                    {"duplicate_text", s.skipped_duplicate_text}};
    print_json(j);
  } else {
    std::cout << "admitted " << s.admitted << ", skipped " << s.skipped() << " (malformed " << s.skipped_malformed
              << ", no url " << s.skipped_no_url << ", too long " << s.skipped_too_long << ", duplicate id "
              << s.skipped_duplicate_id << ", duplicate text " << s.skipped_duplicate_text << ")\n";
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  }
  return kExitOk;
}

// --- label ----------------------------------------------------------------

int cmd_label(const std::string& path, const std::vector<std::string>& blacklists, const std::string& at_s,
              const std::string& recheck, const std::string& out, bool json) {
  const auto corpus = tg::load(path);
  const auto stores = load_blacklists(blacklists);
  const tg::Timestamp at = tg::parse_iso8601_or_throw(at_s, "--at");
  tg::LabeledCorpus labeled = tg::apply_labels(corpus, tg::verdicts_at(corpus, stores, at), at);
  std::size_t flips = 0;
  if (!recheck.empty()) {
    auto r = tg::delayed_relabel(labeled, stores, at, tg::parse_duration(recheck));
    labeled = std::move(r.corpus);
    flips = r.flips;
  }
  tg::persist(labeled, out.empty() ? path : out);
  std::size_t phishing = 0;
  for (const auto& e : labeled.entries) phishing += e.label && e.label->value == tg::LabelValue::kPhishing;
  if (json) {
    nlohmann::ordered_json j;
    j["entries"] = labeled.entries.size();
    j["phishing"] = phishing;
    j["safe"] = labeled.entries.size() - phishing;
    j["flips"] = flips;
    print_json(j);
  } else {
    std::cout << "labeled " << labeled.entries.size() << " (" << phishing << " phishing, "
              << labeled.entries.size() - phishing << " safe), flips " << flips << '\n';
  }
  return kExitOk;
}

// --- extract --------------------------------------------------------------

int cmd_extract(const std::string& path, const ExtractorFlags& flags, const std::string& out, bool json) {
  const auto corpus = tg::load(path);
  const auto ex = flags.build();
  const auto result = tg::extract_corpus(corpus, ex, tg::GroupTimeouts::unlimited(), flags.mode());
  result.vectors.save(out);
  if (json) {
    print_json(result.stats.to_json());
  } else {
    const auto& s = result.stats;
    std::cout << "extracted " << s.tweets << " vectors (" << s.skipped_no_url << " tweets without URL)\n";
    for (std::size_t g = 0; g < 4; ++g) {
      std::printf("  %s available %zu/%zu\n", std::string(tg::group_name(static_cast<tg::FeatureGroup>(g))).c_str(),
                  s.available[g], s.tweets);
    }
  }
  return kExitOk;
}

// --- train / evaluate / ablate / importance ------------------------------

int cmd_train(const std::string& path, const TrainFlags& flags, std::uint64_t seed, const std::string& out,
              bool json) {
  const auto vectors = tg::VectorsFile::load(path);
  const auto model = tg::ml::train(vectors.dataset(), flags.params(), seed, vectors.generated_at, vectors.registrars);
  tg::ml::save_model(model, out);
  if (json) {
    nlohmann::ordered_json j;
    j["algorithm"] = tg::ml::to_string(model.algorithm);
    j["n_samples"] = model.training_meta.n_samples;
    j["n_phishing"] = model.training_meta.n_phishing;
    j["degenerate"] = model.training_meta.degenerate;
    j["model"] = out;
    print_json(j);
  } else {
    std::cout << "trained " << tg::ml::to_string(model.algorithm) << " on " << model.training_meta.n_samples
              << " samples (" << model.training_meta.n_phishing << " phishing) -> " << out << '\n';
    if (model.training_meta.degenerate) std::cerr << "warning: single-class training set; model is degenerate\n";
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& path, const TrainFlags& flags, std::uint64_t seed, bool json) {
  const auto data = tg::VectorsFile::load(path).dataset();
  std::vector<tg::ml::Algorithm> algos;
  if (tg::text::ascii_lower(flags.algo) == "all") {
    algos = {tg::ml::Algorithm::kNaiveBayes, tg::ml::Algorithm::kDecisionTree, tg::ml::Algorithm::kRandomForest};
  } else {
    algos = {tg::ml::parse_algorithm(flags.algo)};
  }
  std::vector<tg::EvaluationReport> reports;
  for (auto a : algos) reports.push_back(tg::cross_validate(data, flags.params_for(a), seed));
  if (json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : reports) j.push_back(to_ordered(r.to_json()));
    print_json(reports.size() == 1 ? j[0] : j);
  } else {
    std::cout << tg::format_results_table(reports);
    for (const auto& r : reports) {
      std::cout << '\n' << tg::ml::to_string(r.algorithm) << " confusion matrix (5-fold, seed " << seed << ")\n"
                << tg::format_confusion_matrix(r.matrix);
    }
  }
  return kExitOk;
}

int cmd_ablate(const std::string& path, const TrainFlags& flags, std::uint64_t seed, bool json) {
  const auto data = tg::VectorsFile::load(path).dataset();
  const auto reports = tg::ablate(data, flags.params(), seed);
  if (json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      nlohmann::ordered_json row;
      row["features"] = std::string(tg::kAblationRows[i]);
      row["report"] = to_ordered(reports[i].to_json());
      j.push_back(std::move(row));
    }
    print_json(j);
  } else {
    std::cout << tg::format_ablation_table(reports);
  }
  return kExitOk;
}

int cmd_importance(const std::string& model_path, const std::string& vectors_path, std::uint64_t seed,
                   int repeats, const std::string& scope, bool json) {
  const auto model = tg::ml::load_model(model_path);
  const auto data = tg::VectorsFile::load(vectors_path).dataset();
  tg::ml::ImportanceScope s;
  if (scope == "member") {
    s = tg::ml::ImportanceScope::kPerMember;
  } else if (scope == "model") {
    s = tg::ml::ImportanceScope::kModel;
  } else {
    throw Error(ErrorCode::kBadRequest, "--scope must be 'member' or 'model'");
  }
  const auto ranking = tg::ml::permutation_importance(model, data, seed, repeats, s);
  if (json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      j.push_back({{"rank", i + 1}, {"feature", ranking[i].feature}, {"importance", ranking[i].importance}});
    }
    print_json(j);
  } else {
    std::printf("%-6s%-26s%s\n", "Rank", "Feature", "Importance");
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      std::printf("%-6zu%-26s%.6f\n", i + 1, ranking[i].feature.c_str(), ranking[i].importance);
    }
  }
  return kExitOk;
}

// --- classify -------------------------------------------------------------

int cmd_classify(const std::string& tweet_path, const std::string& model_path, const ExtractorFlags& flags,
                 bool debug) {
  std::ifstream in(tweet_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + tweet_path);
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, tweet_path + ": " + e.what());
  }
  // Accept either a bare tweet record or a request body.
  nlohmann::json body = record.contains("tweet") || record.contains("tweet_id") ? record
                                                                                : nlohmann::json{{"tweet", record}};
  if (debug) body["debug"] = true;
  const auto request = tg::ClassifyRequest::from_json(body);
  if (!request.tweet) throw Error(ErrorCode::kBadRequest, "classify needs an inline tweet");
  const auto model = tg::ml::load_model(model_path);
  const auto ex = flags.build();
  const auto response = tg::classify_tweet(request, model, ex, nullptr, {}, flags.mode());
  std::cout << response.to_json().dump() << '\n';
  return response.verdict == tg::LabelValue::kPhishing ? kExitPhishing : kExitOk;
}

// --- compare-blacklist ----------------------------------------------------

int cmd_compare(const std::string& input, const std::string& model_path, const std::vector<std::string>& blacklists,
                const std::string& t0_s, const std::string& delay_s, const ExtractorFlags& flags, bool json) {
  const auto model = tg::ml::load_model(model_path);
  const auto stores = load_blacklists(blacklists);
  const tg::Timestamp t0 = tg::parse_iso8601_or_throw(t0_s, "--t0");
  const tg::Duration delay = tg::parse_duration(delay_s);

  std::ifstream in(input, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + input);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, input + ": " + e.what());
  }
  tg::CatchRate rate;
  if (doc.is_object() && doc.value("kind", "") == "feature_vectors") {
    // Precomputed vectors: features come from the file, URLs from its rows.
    const auto vectors = tg::VectorsFile::from_json(doc);
    std::vector<tg::CatchItem> items;
    for (const auto& r : vectors.rows) items.push_back({r.urls, r.values});
    rate = tg::zero_hour_catch_rate(model, items, stores, t0, delay);
  } else {
    const auto corpus = tg::load(input);
    const auto ex = flags.build();
    auto extract = [&](const tg::Tweet& t) {
      return tg::extract_features(t, ex, model.registrar_freq_table, tg::GroupTimeouts::unlimited(), flags.mode())
          .vector;
    };
    rate = tg::zero_hour_catch_rate(model, corpus, extract, stores, t0, delay);
  }
  if (json) {
    nlohmann::ordered_json j;
    j["t0"] = tg::format_iso8601(t0);
    j["delay_s"] = delay.count();
    j["eligible"] = rate.eligible;
    j["caught"] = rate.caught;
    j["catch_rate"] = rate.rate();
    print_json(j);
  } else {
    std::printf("late-blacklisted %zu, flagged at zero hour %zu, catch rate %.2f%%\n", rate.eligible, rate.caught,
                100.0 * rate.rate());
  }
  return kExitOk;
}

// --- synth ----------------------------------------------------------------

int cmd_synth(std::size_t n, double sep, std::uint64_t seed, const std::string& out, bool json) {
  const auto data = tg::generate_synthetic_corpus(n, sep, seed);
  tg::vectors_from_dataset(data).save(out);
  if (json) {
    nlohmann::ordered_json j;
    j["n"] = data.size();
    j["phishing"] = data.count(tg::ml::kPhishing);
    j["generator"] = std::string(tg::kSyntheticGeneratorVersion);
    j["output"] = out;
    print_json(j);
  } else {
    std::cout << "wrote " << data.size() << " synthetic vectors (" << data.count(tg::ml::kPhishing)
              << " phishing) -> " << out << '\n';
  }
  return kExitOk;
}

// --- serve ----------------------------------------------------------------

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

struct ServeFlags {
  std::string model;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string tweets;
  std::string cors = "*";
  long deadline_ms = 2000, f1_ms = 1200, f2_ms = 800, f3_ms = 50, f4_ms = 50;
};

int cmd_serve(const ServeFlags& s, const ExtractorFlags& flags) {
  tg::ServiceConfig cfg;
  cfg.model = std::make_shared<const tg::ml::TrainedModel>(tg::ml::load_model(s.model));
  cfg.extractors = flags.build();
  cfg.mode = flags.mode();
  std::string tweets = s.tweets;
  if (tweets.empty() && !flags.fixtures.empty() && std::filesystem::exists(std::filesystem::path(flags.fixtures) / "tweets.jsonl")) {
    tweets = (std::filesystem::path(flags.fixtures) / "tweets.jsonl").string();
  }
  if (!tweets.empty()) {
    cfg.provider = std::make_shared<tg::JsonlTweetProvider>(tg::JsonlTweetProvider::from_file(tweets));
  } else if (flags.live) {
    cfg.provider = std::make_shared<tg::LiveTweetProvider>();
  }
  cfg.timeouts = {tg::Millis(s.deadline_ms), tg::Millis(s.f1_ms), tg::Millis(s.f2_ms), tg::Millis(s.f3_ms),
                  tg::Millis(s.f4_ms)};
  cfg.cors_origin = s.cors;
  tg::Service service(std::move(cfg));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const int port = service.start(s.host, s.port);
  std::cout << "listening on http://" << s.host << ":" << port << " (model " << service.version() << ")"
            << std::endl;
  while (g_stop == 0) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tweetguard: phishing detection for URLs posted in tweets"};
  app.require_subcommand(1);
  bool json = false;
  std::uint64_t seed = 42;

  // ingest
  std::string ingest_in, ingest_out;
  bool keep_text_dupes = false;
  auto* ingest = app.add_subcommand("ingest", "Admit a JSONL tweet stream into a corpus");
  ingest->add_option("input", ingest_in, "Tweet stream (JSONL)")->required();
  ingest->add_option("output", ingest_out, "Corpus file to write")->required();
  ingest->add_flag("--keep-duplicate-text", keep_text_dupes, "Do not drop tweets with repeated text");
  ingest->add_flag("--json", json, "Machine-readable output");

  // label
  std::string label_corpus, label_at, label_recheck, label_out;
  std::vector<std::string> label_lists;
  auto* label = app.add_subcommand("label", "Label a corpus from time-stamped blacklists");
  label->add_option("corpus", label_corpus, "Corpus file")->required();
  label->add_option("--blacklist", label_lists, "Blacklist file (repeatable)")->required();
  label->add_option("--at", label_at, "Lookup time (ISO 8601)")->required();
  label->add_option("--recheck-after", label_recheck, "Re-check delay, e.g. 3d");
  label->add_option("-o,--output", label_out, "Output corpus (default: overwrite input)");
  label->add_flag("--json", json, "Machine-readable output");

  // extract
  std::string extract_corpus, extract_out;
  ExtractorFlags extract_flags;
  auto* extract = app.add_subcommand("extract", "Compute 22-slot feature vectors for a corpus");
  extract->add_option("corpus", extract_corpus, "Corpus file")->required();
  extract_flags.add_to(extract);
  extract->add_option("-o,--output", extract_out, "Vectors file to write")->required();
  extract->add_flag("--json", json, "Machine-readable output");

  // train
  std::string train_in, train_out;
  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train a classifier on a vectors file");
  train->add_option("vectors", train_in, "Vectors file")->required();
  train_flags.add_to(train);
  train->add_option("--seed", seed, "RNG seed")->capture_default_str();
  train->add_option("-o,--output", train_out, "Model file to write")->required();
  train->add_flag("--json", json, "Machine-readable output");

  // evaluate
  std::string eval_in;
  TrainFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "5-fold cross-validation report");
  evaluate->add_option("vectors", eval_in, "Vectors file")->required();
  eval_flags.add_to(evaluate);
  evaluate->add_option("--seed", seed, "RNG seed")->capture_default_str();
  evaluate->add_flag("--json", json, "Machine-readable output");

  // ablate
  std::string ablate_in;
  TrainFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "Accuracy by cumulative feature group");
  ablate->add_option("vectors", ablate_in, "Vectors file")->required();
  ablate_flags.add_to(ablate);
  ablate->add_option("--seed", seed, "RNG seed")->capture_default_str();
  ablate->add_flag("--json", json, "Machine-readable output");

  // importance
  std::string imp_model, imp_vectors, imp_scope = "member";
  int imp_repeats = 5;
  auto* importance = app.add_subcommand("importance", "Permutation feature importance ranking");
  importance->add_option("model", imp_model, "Model file")->required();
  importance->add_option("vectors", imp_vectors, "Evaluation vectors file")->required();
  importance->add_option("--seed", seed, "RNG seed")->capture_default_str();
  importance->add_option("--repeats", imp_repeats, "Shuffles per feature")->capture_default_str();
  importance->add_option("--scope", imp_scope, "member (per ensemble member) | model")->capture_default_str();
  importance->add_flag("--json", json, "Machine-readable output");

  // classify
  std::string cls_tweet, cls_model;
  bool cls_debug = false;
  ExtractorFlags cls_flags;
  auto* classify = app.add_subcommand("classify", "Classify one tweet (exit 0 safe, 2 phishing)");
  classify->add_option("tweet", cls_tweet, "Tweet record (JSON)")->required();
  classify->add_option("--model", cls_model, "Model file")->required();
  cls_flags.add_to(classify);
  classify->add_flag("--debug", cls_debug, "Echo the feature vector");

  // compare-blacklist
  std::string cmp_in, cmp_model, cmp_t0, cmp_delay;
  std::vector<std::string> cmp_lists;
  ExtractorFlags cmp_flags;
  auto* compare = app.add_subcommand("compare-blacklist", "Zero-hour catch rate against late blacklisting");
  compare->add_option("input", cmp_in, "Corpus file or vectors file")->required();
  compare->add_option("--model", cmp_model, "Model file")->required();
  compare->add_option("--blacklist", cmp_lists, "Blacklist file (repeatable)")->required();
  compare->add_option("--t0", cmp_t0, "First-sight time (ISO 8601)")->required();
  compare->add_option("--delay", cmp_delay, "Blacklisting window, e.g. 3d")->required();
  cmp_flags.add_to(compare);
  compare->add_flag("--json", json, "Machine-readable output");

  // synth
  std::size_t synth_n = 3000;
  double synth_sep = 1.0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled vectors file");
  synth->add_option("--n", synth_n, "Rows")->capture_default_str();
  synth->add_option("--sep", synth_sep, "Class separability in [0, 1]")->capture_default_str();
  synth->add_option("--seed", seed, "RNG seed")->capture_default_str();
  synth->add_option("-o,--output", synth_out, "Vectors file to write")->required();
  synth->add_flag("--json", json, "Machine-readable output");

  // serve
  ServeFlags serve_flags;
  ExtractorFlags serve_ex;
  auto* serve = app.add_subcommand("serve", "Run the HTTP classification service");
  serve->add_option("--model", serve_flags.model, "Model file")->required()->envname("TWEETGUARD_MODEL");
  serve->add_option("--host", serve_flags.host, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_flags.port, "TCP port (0: any free port)")
      ->capture_default_str()
      ->envname("TWEETGUARD_PORT");
  serve->add_option("--fixtures", serve_ex.fixtures, "Fixture directory")->envname("TWEETGUARD_FIXTURES");
  serve->add_option("--trends", serve_ex.trends, "Trending-hashtag file");
  serve->add_flag("--live", serve_ex.live, "Use real HTTP and WHOIS");
  serve->add_flag("--sequential", serve_ex.sequential, "Run the feature groups one after another");
  serve->add_option("--tweets", serve_flags.tweets, "Tweet store for tweet_id lookups (JSONL)");
  serve->add_option("--cors-origin", serve_flags.cors, "Access-Control-Allow-Origin value")->capture_default_str();
  serve->add_option("--deadline-ms", serve_flags.deadline_ms, "Overall extraction deadline")->capture_default_str();
  serve->add_option("--f1-timeout-ms", serve_flags.f1_ms, "URL group timeout")->capture_default_str();
  serve->add_option("--f2-timeout-ms", serve_flags.f2_ms, "WHOIS group timeout")->capture_default_str();
  serve->add_option("--f3-timeout-ms", serve_flags.f3_ms, "Tweet group timeout")->capture_default_str();
  serve->add_option("--f4-timeout-ms", serve_flags.f4_ms, "Network group timeout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_in, ingest_out, keep_text_dupes, json);
    if (*label) return cmd_label(label_corpus, label_lists, label_at, label_recheck, label_out, json);
    if (*extract) return cmd_extract(extract_corpus, extract_flags, extract_out, json);
    if (*train) return cmd_train(train_in, train_flags, seed, train_out, json);
    if (*evaluate) return cmd_evaluate(eval_in, eval_flags, seed, json);
    if (*ablate) return cmd_ablate(ablate_in, ablate_flags, seed, json);
    if (*importance) return cmd_importance(imp_model, imp_vectors, seed, imp_repeats, imp_scope, json);
    if (*classify) return cmd_classify(cls_tweet, cls_model, cls_flags, cls_debug);
    if (*compare) return cmd_compare(cmp_in, cmp_model, cmp_lists, cmp_t0, cmp_delay, cmp_flags, json);
    if (*synth) return cmd_synth(synth_n, synth_sep, seed, synth_out, json);
    if (*serve) return cmd_serve(serve_flags, serve_ex);
  } catch (const Error& e) {
    std::cerr << "error: " << tg::error_code_name(e.code()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
