#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "phishkd/error.hpp"
#include "phishkd/eval.hpp"
#include "phishkd/random.hpp"

using namespace phishkd;

namespace {

// Pairwise oracle: count phish-over-ham wins, ties counting one half.
double auc_oracle(const std::vector<double>& s, const std::vector<Label>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != Label::phish) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != Label::ham) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

std::vector<Label> make_labels(std::size_t ham, std::size_t phish) {
  std::vector<Label> y(ham, Label::ham);
  y.insert(y.end(), phish, Label::phish);
  return y;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("worked example") {
    const ConfusionMatrix cm{45, 5, 2, 48};
    const auto m = compute_metrics(cm);
    CHECK(m.precision == doctest::Approx(0.95745).epsilon(1e-5));
    CHECK(m.recall == doctest::Approx(0.9).epsilon(1e-5));
    CHECK(m.f_measure == doctest::Approx(0.92784).epsilon(1e-5));
    CHECK(m.tp_rate == 0.9);
    CHECK(m.fp_rate == 0.04);
    CHECK(m.undefined.empty());
  }

  TEST_CASE("metric identities on random matrices") {
    Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
      ConfusionMatrix cm{rng.below(50), rng.below(50), rng.below(50), rng.below(50)};
      if (cm.total() == 0) continue;
      const auto m = compute_metrics(cm);
      if (cm.positives() > 0) CHECK(std::fabs(m.tp_rate + m.fn_rate - 1.0) <= 1e-12);
      if (cm.negatives() > 0) CHECK(std::fabs(m.tn_rate + m.fp_rate - 1.0) <= 1e-12);
      CHECK(m.recall == m.tp_rate);
      if (m.precision + m.recall > 0) {
        CHECK(std::fabs(m.f_measure - 2 * m.precision * m.recall / (m.precision + m.recall)) <= 1e-12);
      }
    }
  }

  TEST_CASE("undefined ratios are flagged, not thrown") {
    const auto flagged = [](const Metrics& m, const char* name) {
      return std::find(m.undefined.begin(), m.undefined.end(), name) != m.undefined.end();
    };
    // no phish at all: rates over positives are 0/0, precision is 0/3
    auto m = compute_metrics(ConfusionMatrix{0, 0, 3, 7});
    CHECK(m.tp_rate == 0.0);
    CHECK(flagged(m, "tp_rate"));
    CHECK_FALSE(flagged(m, "precision"));
    // nothing predicted phish: precision is 0/0
    m = compute_metrics(ConfusionMatrix{0, 5, 0, 7});
    CHECK(m.precision == 0.0);
    CHECK(flagged(m, "precision"));
    CHECK_FALSE(flagged(m, "tp_rate"));
    CHECK_THROWS_AS(compute_metrics(ConfusionMatrix{}), Error);
  }

  TEST_CASE("confusion matrix bookkeeping") {
    ConfusionMatrix cm;
    cm.add(Label::phish, Label::phish);
    cm.add(Label::phish, Label::ham);
    cm.add(Label::ham, Label::phish);
    cm.add(Label::ham, Label::ham);
    cm.add(Label::ham, Label::ham);
    CHECK(cm == ConfusionMatrix{1, 1, 1, 2});
    CHECK(cm.flipped() == ConfusionMatrix{2, 1, 1, 1});
  }

  TEST_CASE("AUC matches the pairwise oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t n = 2 + rng.below(11);
      std::vector<double> s(n);
      std::vector<Label> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rng.below(5)) / 4.0;
        y[i] = rng.below(2) ? Label::phish : Label::ham;
      }
      y[0] = Label::phish;
      y[1] = Label::ham;
      REQUIRE(roc_auc(s, y) == auc_oracle(s, y));
    }
    CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, make_labels(2, 0)), Error);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1}, make_labels(1, 1)), Error);
  }

  TEST_CASE("ROC curve shape and area") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.below(30);
      std::vector<double> s(n);
      std::vector<Label> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rng.below(8)) / 7.0;
        y[i] = rng.below(2) ? Label::phish : Label::ham;
      }
      y[0] = Label::phish;
      y[1] = Label::ham;
      const auto pts = roc_curve(s, y);
      CHECK(pts.front().fpr == 0.0);
      CHECK(pts.front().tpr == 0.0);
      CHECK(pts.back().fpr == 1.0);
      CHECK(pts.back().tpr == 1.0);
      double area = 0.0;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].fpr >= pts[i - 1].fpr);
        CHECK(pts[i].tpr >= pts[i - 1].tpr);
        area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
      }
      CHECK(area == doctest::Approx(roc_auc(s, y)).epsilon(1e-12));
    }
    const std::vector<RocPoint> pts{{0, 0, std::numeric_limits<double>::infinity()}, {0.5, 1, 0.25}};
    CHECK(roc_to_csv(pts) == "fpr,tpr,threshold\n0,0,inf\n0.5,1,0.25\n");
  }

  TEST_CASE("stratified folds: exact divisibility") {
    const auto y = make_labels(60, 40);
    const auto plan = stratified_folds(y, 10, 7);
    for (std::size_t f = 0; f < 10; ++f) {
      const auto test = plan.test_indices(f);
      std::size_t ham = 0;
      for (const auto i : test) ham += y[i] == Label::ham;
      CHECK(ham == 6);
      CHECK(test.size() - ham == 4);
      CHECK(plan.train_indices(f).size() == 90);
    }
  }

  TEST_CASE("stratified folds at corpus scale") {
    const auto y = make_labels(5940, 4598);
    const auto plan = stratified_folds(y, 10, kDefaultSeed);
    std::vector<std::size_t> seen(y.size(), 0);
    for (std::size_t f = 0; f < 10; ++f) {
      const auto test = plan.test_indices(f);
      CHECK(test.size() >= 1053);
      CHECK(test.size() <= 1054);
      std::size_t ham = 0;
      for (const auto i : test) {
        ++seen[i];
        ham += y[i] == Label::ham;
      }
      CHECK(ham == 594);
      CHECK((test.size() - ham == 459 || test.size() - ham == 460));
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](std::size_t c) { return c == 1; }));
  }

  TEST_CASE("fold plans: partition and balance on random labels") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 10 + rng.below(200);
      const std::size_t k = 2 + rng.below(9);
      std::vector<Label> y(n);
      for (auto& l : y) l = rng.below(3) ? Label::ham : Label::phish;
      const auto plan = stratified_folds(y, k, rng.next());
      for (const auto cls : {Label::ham, Label::phish}) {
        std::vector<std::size_t> per_fold(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
          REQUIRE(plan.assignments[i] < k);
          if (y[i] == cls) ++per_fold[plan.assignments[i]];
        }
        const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
        CHECK(*hi - *lo <= 1);
      }
      std::vector<std::size_t> totals(k, 0);
      for (const auto f : plan.assignments) ++totals[f];
      const auto [lo, hi] = std::minmax_element(totals.begin(), totals.end());
      CHECK(*hi - *lo <= 1);
    }
    CHECK_THROWS_AS(stratified_folds(make_labels(3, 2), 10, 1), Error);
    CHECK_THROWS_AS(stratified_folds(make_labels(3, 2), 1, 1), Error);
  }

  TEST_CASE("separable 60-row table under tree CV") {
    const auto ds = testing::threshold_dataset(60, 5, 2, 50.0, 60);
    ModelParams p;
    p.algorithm = Algorithm::tree;
    const auto report = cross_validate(ds, p, CvOptions{});
    CHECK(report.accuracy == 1.0);
    CHECK(report.weighted_average.f_measure == 1.0);
    CHECK(report.per_fold.size() == 10);
  }

  TEST_CASE("weighted average by hand on a 2-fold run") {
    // Noisy table so per-class metrics differ.
    auto ds = testing::threshold_dataset(24, 3, 0, 50.0, 3);
    for (std::size_t i = 0; i < ds.size(); i += 5) ds.rows[i].values[0] = 50.0;
    ModelParams p;
    p.algorithm = Algorithm::naive_bayes;
    CvOptions o;
    o.k = 2;
    const auto r = cross_validate(ds, p, o);
    const auto& ham = r.per_class[0];
    const auto& phish = r.per_class[1];
    CHECK(ham.support + phish.support == 24);
    const double n = 24.0;
    const double wh = static_cast<double>(ham.support) / n;
    const double wp = static_cast<double>(phish.support) / n;
    CHECK(r.weighted_average.precision ==
          doctest::Approx(wh * ham.metrics.precision + wp * phish.metrics.precision).epsilon(1e-15));
    CHECK(r.weighted_average.tp_rate ==
          doctest::Approx(wh * ham.metrics.tp_rate + wp * phish.metrics.tp_rate).epsilon(1e-15));
    CHECK(r.weighted_average.f_measure ==
          doctest::Approx(wh * ham.metrics.f_measure + wp * phish.metrics.f_measure).epsilon(1e-15));
    CHECK(r.macro_average.recall == doctest::Approx((ham.metrics.recall + phish.metrics.recall) / 2));
    // Ham metrics are phish metrics of the flipped matrix.
    CHECK(ham.metrics.tp_rate == compute_metrics(r.pooled.flipped()).tp_rate);
    ConfusionMatrix sum;
    for (const auto& f : r.per_fold) sum += f.cm;
    CHECK(sum == r.pooled);
  }

  TEST_CASE("same seed, same report") {
    const auto ds = testing::threshold_dataset(50, 6, 1, 40.0, 12);
    ModelParams p;
    CvOptions o;
    o.seed = 42;
    const auto a = report_to_json(cross_validate(ds, p, o));
    CHECK(report_to_json(cross_validate(ds, p, o)) == a);
    o.jobs = 3;
    CHECK(report_to_json(cross_validate(ds, p, o)) == a);
  }

  TEST_CASE("per-fold lexicon never sees test-only phishing terms") {
    const auto ham = load_corpus(testing::ham_dir(), CorpusFormat::eml_dir, Label::ham);
    const auto phish = load_corpus(testing::phish_mbox(), CorpusFormat::mbox, Label::phish);
    std::vector<RawEmail> all = ham.emails;
    all.insert(all.end(), phish.emails.begin(), phish.emails.end());
    const auto corpus = process_corpus(all, TextResources{});

    std::size_t folds_seen = 0;
    CvOptions o;
    o.k = 5;
    o.on_fold = [&](std::size_t, const PhishingLexicon& lex, std::span<const std::size_t> train,
                    std::span<const std::size_t> test) {
      ++folds_seen;
      CHECK(train.size() + test.size() == corpus.size());
      for (const auto& [term, entry] : lex.entries()) {
        std::size_t df = 0;
        for (const auto i : train) {
          const bool has = corpus[i].terms.term_set.count(term) > 0;
          if (corpus[i].label == Label::ham) CHECK_FALSE(has);
          if (corpus[i].label == Label::phish) df += has;
        }
        CHECK(df == entry.tdf);
      }
    };
    ModelParams p;
    const auto r = cross_validate(std::span<const ProcessedEmail>(corpus), p, o);
    CHECK(folds_seen == 5);
    CHECK(r.accuracy == 1.0);
    for (const auto& f : r.per_fold) CHECK(f.lexicon_terms > 0);
  }

  TEST_CASE("text report layout") {
    const auto ds = testing::threshold_dataset(40, 3, 0, 50.0, 4);
    ModelParams p;
    p.features_per_split = 2;
    const auto text = report_to_text(cross_validate(ds, p, CvOptions{}));
    CHECK(text.find("TP Rate") != std::string::npos);
    CHECK(text.find("ROC Area") != std::string::npos);
    CHECK(text.find("Weighted Avg.") != std::string::npos);
  }
}
