#include <gtest/gtest.h>

#include <set>

#include "tweetguard/evaluation.hpp"
#include "tweetguard/synthetic.hpp"

namespace tweetguard {
namespace {

// Equal as fractions and in lowest terms.
void expect_fraction(const std::optional<Rational>& got, std::uint64_t num, std::uint64_t den) {
  if (den == 0) {
    EXPECT_FALSE(got.has_value());
    return;
  }
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ(got->num * den, num * got->den);
  EXPECT_EQ(std::gcd(got->num, got->den), got->num == 0 ? got->den : 1u);
  if (got->num == 0) {
    EXPECT_EQ(got->den, 1u);
  }
}

TEST(MetricsTest, WorkedExample) {
  const auto m = metrics({92, 8, 10, 90});
  EXPECT_EQ(m.accuracy, (Rational{91, 100}));
  EXPECT_DOUBLE_EQ(m.accuracy.value(), 0.91);
  EXPECT_EQ(*m.precision_phishing, (Rational{46, 51}));
  EXPECT_NEAR(m.precision_phishing->value(), 0.902, 5e-4);
  EXPECT_EQ(*m.recall_phishing, (Rational{23, 25}));
  EXPECT_EQ(*m.precision_safe, (Rational{45, 49}));
  EXPECT_EQ(*m.recall_safe, (Rational{9, 10}));
}

TEST(MetricsTest, UndefinedIsDistinctFromZero) {
  const auto m = metrics({0, 0, 0, 100});
  EXPECT_FALSE(m.precision_phishing.has_value());
  EXPECT_FALSE(m.recall_phishing.has_value());
  EXPECT_EQ(m.accuracy.value(), 1.0);
  const auto z = metrics({0, 5, 0, 5});
  ASSERT_TRUE(z.recall_phishing.has_value());
  EXPECT_EQ(z.recall_phishing->value(), 0.0);
  EXPECT_FALSE(z.precision_phishing.has_value());
  EXPECT_TRUE(metrics_to_json(m)["precision_phishing"].is_null());
}

TEST(MetricsTest, PerfectClassifier) {
  const auto m = metrics({40, 0, 0, 60});
  for (const auto& r : {std::optional<Rational>(m.accuracy), m.precision_phishing, m.precision_safe,
                        m.recall_phishing, m.recall_safe}) {
    EXPECT_EQ(*r, (Rational{1, 1}));
  }
}

TEST(MetricsTest, AllZeroIsContractError) {
  try {
    metrics({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContract);
  }
}

TEST(MetricsTest, RandomMatricesMatchHandRationals) {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    ConfusionMatrix c{rng.below(30), rng.below(30), rng.below(30), rng.below(30)};
    if (c.total() == 0) c.tn = 1;
    const auto m = metrics(c);
    expect_fraction(m.accuracy, c.tp + c.tn, c.tp + c.fp + c.tn + c.fn);
    expect_fraction(m.precision_phishing, c.tp, c.tp + c.fp);
    expect_fraction(m.recall_phishing, c.tp, c.tp + c.fn);
    expect_fraction(m.precision_safe, c.tn, c.tn + c.fn);
    expect_fraction(m.recall_safe, c.tn, c.tn + c.fp);
  }
}

TEST(FoldsTest, PartitionLawAndStratification) {
  std::vector<std::uint8_t> y(100, 0);
  for (std::size_t i = 0; i < 37; ++i) y[i * 2] = 1;
  const auto fold = stratified_folds(y, 5, 7);
  std::array<int, 5> size{}, phish{};
  for (std::size_t i = 0; i < y.size(); ++i) {
    ASSERT_GE(fold[i], 0);
    ASSERT_LT(fold[i], 5);
    ++size[static_cast<std::size_t>(fold[i])];
    phish[static_cast<std::size_t>(fold[i])] += y[i];
  }
  for (int f = 0; f < 5; ++f) {
    EXPECT_EQ(size[f], 20);
    EXPECT_LE(std::abs(phish[f] - 37.0 / 5.0), 1.0);
  }
  EXPECT_EQ(fold, stratified_folds(y, 5, 7));
  EXPECT_NE(fold, stratified_folds(y, 5, 8));
}

TEST(FoldsTest, OddSizesDifferByAtMostOne) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::uint8_t> y(10 + rng.below(200));
    for (auto& v : y) v = static_cast<std::uint8_t>(rng.below(2));
    const auto fold = stratified_folds(y, 5, t);
    std::array<int, 5> size{};
    for (int f : fold) ++size[static_cast<std::size_t>(f)];
    EXPECT_LE(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()), 1);
  }
}

TEST(CrossValidateTest, PerFoldSumsAndDeterminism) {
  const auto d = generate_synthetic_corpus(100, 1.0, 1);
  ml::TrainParams p;
  p.n_trees = 10;
  const auto a = cross_validate(d, p, 3);
  ASSERT_EQ(a.per_fold.size(), 5u);
  ConfusionMatrix sum;
  for (const auto& f : a.per_fold) {
    EXPECT_EQ(f.total(), 20u);
    sum += f;
  }
  EXPECT_EQ(sum, a.matrix);
  EXPECT_EQ(a.matrix.total(), 100u);
  const auto b = cross_validate(d, p, 3);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(CrossValidateTest, NeedsFivePerClass) {
  ml::Dataset d;
  d.feature_names = {"url_length"};
  for (int i = 0; i < 20; ++i) {
    const double v = i;
    d.add(std::span<const double>(&v, 1), i < 4 ? 1 : 0);
  }
  try {
    cross_validate(d, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTraining);
    EXPECT_NE(std::string(e.what()).find("phishing"), std::string::npos);
  }
}

TEST(AblationTest, SlicesGroupsInTableOrder) {
  const auto d = generate_synthetic_corpus(1000, 1.0, 17);
  ml::TrainParams p;
  p.n_trees = 30;
  const auto rows = ablate(d, p, 4);
  ASSERT_EQ(rows.size(), 4u);
  const std::array<std::size_t, 4> widths = {6, 9, 15, 22};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(rows[i].feature_names.size(), widths[i]);
  EXPECT_EQ(rows[0].feature_names.back(), "conditional_redirect");
  EXPECT_GT(rows[3].accuracy(), rows[0].accuracy());
  const std::string table = format_ablation_table(rows);
  EXPECT_LT(table.find("F1 + F2 "), table.find("F1 + F2 + F3 + F4"));
}

TEST(ReportTest, TablesMentionEveryMetric) {
  const auto d = generate_synthetic_corpus(200, 1.0, 2);
  ml::TrainParams p;
  p.algorithm = ml::Algorithm::kNaiveBayes;
  const auto r = cross_validate(d, p, 1);
  const std::string t = format_results_table({r});
  for (const char* s : {"Accuracy", "Precision (phishing)", "Precision (safe)", "Recall (phishing)",
                        "Recall (safe)", "Naive Bayes"}) {
    EXPECT_NE(t.find(s), std::string::npos) << s;
  }
  EXPECT_NE(format_confusion_matrix(r.matrix).find(std::to_string(r.matrix.tp)), std::string::npos);
}

TEST(SyntheticTest, BalancedValidAndReproducible) {
  const auto a = generate_synthetic_corpus(1001, 1.0, 42);
  EXPECT_EQ(a.size(), 1001u);
  EXPECT_EQ(a.count(ml::kPhishing), 500u);
  EXPECT_EQ(a.dim(), kFeatureCount);
  EXPECT_TRUE(is_valid_feature_values(a.x));
  const auto b = generate_synthetic_corpus(1001, 1.0, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_synthetic_corpus(1001, 1.0, 43));
  EXPECT_THROW(generate_synthetic_corpus(99, 1.0, 1), Error);
}

TEST(SyntheticTest, NoiseColumnIgnoresLabel) {
  const auto d = generate_synthetic_corpus(20000, 1.0, 5);
  const std::size_t j = feature_index(kSyntheticNoiseFeature);
  // Compare the medians per class (the column is heavy-tailed).
  std::vector<double> v[2];
  for (std::size_t i = 0; i < d.size(); ++i) v[d.y[i]].push_back(d.at(i, j));
  for (auto& c : v) std::sort(c.begin(), c.end());
  EXPECT_EQ(v[0][v[0].size() / 2], v[1][v[1].size() / 2]);
}

TEST(SyntheticTest, ZeroSeparabilityIsChance) {
  const auto d = generate_synthetic_corpus(1000, 0.0, 6);
  ml::TrainParams p;
  p.n_trees = 30;
  EXPECT_NEAR(cross_validate(d, p, 1).accuracy(), 0.5, 0.05);
}

}  // namespace
}  // namespace tweetguard
