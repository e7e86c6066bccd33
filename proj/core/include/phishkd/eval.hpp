#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phishkd/classify.hpp"
#include "phishkd/corpus.hpp"
#include "phishkd/features.hpp"
#include "phishkd/lexicon.hpp"
#include "phishkd/pipeline.hpp"

namespace phishkd {

// Phishing is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;  // phish predicted phish
  std::size_t fn = 0;  // phish predicted ham
  std::size_t fp = 0;  // ham predicted phish
  std::size_t tn = 0;  // ham predicted ham

  std::size_t positives() const noexcept { return tp + fn; }
  std::size_t negatives() const noexcept { return fp + tn; }
  std::size_t total() const noexcept { return positives() + negatives(); }

  void add(Label actual, Label predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  // Same outcomes seen with ham as the positive class.
  ConfusionMatrix flipped() const noexcept { return {tn, fp, fn, tp}; }

  bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
  double tp_rate = 0.0;
  double tn_rate = 0.0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double roc_area = 0.0;
  // Names of fields whose ratio was 0/0 and were reported as 0.
  std::vector<std::string> undefined;

  bool operator==(const Metrics&) const = default;
};

// Rates, precision, recall and F for the positive class. roc_area is left 0.
// Throws EmptyMatrix on an all-zero matrix.
Metrics compute_metrics(const ConfusionMatrix& cm);

// Probability that a random phishing score exceeds a random ham score, ties
// counting one half. Throws SingleClass, LengthMismatch.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

// Points for every distinct score used as a ">= threshold" cut, from the
// strictest cut down, starting at (0, 0).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // row -> fold

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

// Rows of each class are shuffled with the seed and dealt to folds
// round-robin; dealing continues across classes so total fold sizes differ by
// at most one. Throws TooFewRows, InvalidArgument.
FoldPlan stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t lexicon_terms = 0;
  ConfusionMatrix cm;
  Metrics metrics;
};

struct ClassMetrics {
  Label label = Label::ham;
  std::size_t support = 0;
  Metrics metrics;
};

struct EvaluationReport {
  std::string algorithm;
  ModelParams params;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  bool global_lexicon = false;
  std::vector<FoldResult> per_fold;
  ConfusionMatrix pooled;
  std::array<ClassMetrics, 2> per_class;  // {ham, phish}
  Metrics weighted_average;               // support-weighted over the two classes
  Metrics macro_average;                  // unweighted mean of the two classes
  double accuracy = 0.0;
  // Pooled out-of-fold predictions in dataset order.
  std::vector<double> scores;
  std::vector<Label> labels;
};

struct CvOptions {
  std::size_t k = 10;
  std::uint64_t seed = kDefaultSeed;
  bool global_lexicon = false;
  unsigned jobs = 1;
  FeatureOptions features;
  // Called once per fold with the lexicon built for it (instrumentation).
  std::function<void(std::size_t fold, const PhishingLexicon&, std::span<const std::size_t> train,
                     std::span<const std::size_t> test)>
      on_fold;
};

// The phishing lexicon is rebuilt from each fold's training rows unless
// global_lexicon is set.
EvaluationReport cross_validate(std::span<const ProcessedEmail> corpus, const ModelParams& params,
                                const CvOptions& options);

// Cross-validation over fixed feature rows (e.g. a loaded ARFF file).
EvaluationReport cross_validate(const Dataset& ds, const ModelParams& params,
                                const CvOptions& options);

// Builds per-class and averaged metrics from pooled predictions.
void finalize_report(EvaluationReport& report);

std::string report_to_json(const EvaluationReport& report);
// Fixed-width table: TP rate, FP rate, Precision, Recall, F-Measure, ROC Area.
std::string report_to_text(const EvaluationReport& report);
// "fpr,tpr,threshold" with header.
std::string roc_to_csv(std::span<const RocPoint> points);

}  // namespace phishkd
