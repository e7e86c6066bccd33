#include "phishkd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "phishkd/error.hpp"
#include "phishkd/parallel.hpp"

namespace phishkd {
namespace {

constexpr std::uint64_t kFoldStream = 0x666f6c6473ULL;  // "folds"

double ratio(std::size_t num, std::size_t den, const char* name, std::vector<std::string>& undefined) {
  if (den == 0) {
    undefined.emplace_back(name);
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

void check_scored(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(scores.size()) + " scores for " +
                                               std::to_string(labels.size()) + " labels");
  }
}

Metrics combine(const Metrics& ham, double w_ham, const Metrics& phish, double w_phish) {
  Metrics m;
  auto mix = [&](double Metrics::*field) { m.*field = w_ham * (ham.*field) + w_phish * (phish.*field); };
  for (auto field : {&Metrics::tp_rate, &Metrics::tn_rate, &Metrics::fp_rate, &Metrics::fn_rate,
                     &Metrics::precision, &Metrics::recall, &Metrics::f_measure, &Metrics::roc_area}) {
    mix(field);
  }
  for (const auto* side : {&ham.undefined, &phish.undefined}) {
    for (const auto& name : *side) {
      if (std::find(m.undefined.begin(), m.undefined.end(), name) == m.undefined.end()) {
        m.undefined.push_back(name);
      }
    }
  }
  return m;
}

struct FoldOutput {
  FoldResult result;
  std::vector<std::pair<std::size_t, Prediction>> predictions;
};

FoldOutput run_fold(const Dataset& ds, std::size_t fold, const FoldPlan& plan, const ModelParams& params) {
  const auto train_idx = plan.train_indices(fold);
  const auto test_idx = plan.test_indices(fold);
  ModelParams inner = params;
  inner.jobs = 1;
  const auto model = train(ds.subset(train_idx), inner);

  FoldOutput out;
  out.result.fold = fold;
  out.result.train_rows = train_idx.size();
  out.result.test_rows = test_idx.size();
  for (const auto i : test_idx) {
    const auto p = predict(model, std::span<const double>(ds.rows[i].values));
    out.result.cm.add(ds.rows[i].label, p.label);
    out.predictions.emplace_back(i, p);
  }
  if (out.result.cm.total() > 0) out.result.metrics = compute_metrics(out.result.cm);
  return out;
}

EvaluationReport assemble(std::vector<FoldOutput> folds, std::span<const Label> labels,
                          const ModelParams& params, const CvOptions& options) {
  EvaluationReport report;
  report.algorithm = std::string(to_string(params.algorithm));
  report.params = params;
  report.k = options.k;
  report.seed = options.seed;
  report.global_lexicon = options.global_lexicon;
  report.scores.assign(labels.size(), 0.0);
  report.labels.assign(labels.begin(), labels.end());
  for (auto& f : folds) {
    report.pooled += f.result.cm;
    for (const auto& [i, p] : f.predictions) report.scores[i] = p.score;
    report.per_fold.push_back(std::move(f.result));
  }
  finalize_report(report);
  return report;
}

nlohmann::ordered_json metrics_json(const Metrics& m) {
  return {{"tp_rate", m.tp_rate},     {"tn_rate", m.tn_rate},     {"fp_rate", m.fp_rate},
          {"fn_rate", m.fn_rate},     {"precision", m.precision}, {"recall", m.recall},
          {"f_measure", m.f_measure}, {"roc_area", m.roc_area},   {"undefined", m.undefined}};
}

nlohmann::ordered_json cm_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

}  // namespace

void ConfusionMatrix::add(Label actual, Label predicted) {
  if (actual == Label::unlabeled) throw Error(ErrorCode::InvalidArgument, "cannot score an unlabeled row");
  if (actual == Label::phish) {
    ++(predicted == Label::phish ? tp : fn);
  } else {
    ++(predicted == Label::phish ? fp : tn);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fn += other.fn;
  fp += other.fp;
  tn += other.tn;
  return *this;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  Metrics m;
  m.tp_rate = ratio(cm.tp, cm.positives(), "tp_rate", m.undefined);
  m.fn_rate = ratio(cm.fn, cm.positives(), "fn_rate", m.undefined);
  m.fp_rate = ratio(cm.fp, cm.negatives(), "fp_rate", m.undefined);
  m.tn_rate = ratio(cm.tn, cm.negatives(), "tn_rate", m.undefined);
  m.precision = ratio(cm.tp, cm.tp + cm.fp, "precision", m.undefined);
  m.recall = m.tp_rate;
  if (cm.positives() == 0) m.undefined.emplace_back("recall");
  if (m.precision + m.recall > 0.0) {
    m.f_measure = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.undefined.emplace_back("f_measure");
  }
  return m;
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  check_scored(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the number of (phish, ham) pairs won by phish, ties counting one.
  std::uint64_t doubled = 0;
  std::uint64_t ham_below = 0;
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t g_pos = 0;
    std::uint64_t g_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      const Label l = labels[order[j]];
      if (l == Label::phish) ++g_pos;
      if (l == Label::ham) ++g_neg;
      ++j;
    }
    doubled += 2 * g_pos * ham_below + g_pos * g_neg;
    ham_below += g_neg;
    pos += g_pos;
    neg += g_neg;
    i = j;
  }
  if (pos == 0 || neg == 0) throw Error(ErrorCode::SingleClass, "ROC area needs both classes");
  return static_cast<double>(doubled) / static_cast<double>(2 * pos * neg);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels) {
  check_scored(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::phish));
  const auto neg = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::ham));
  if (pos == 0 || neg == 0) throw Error(ErrorCode::SingleClass, "ROC curve needs both classes");

  std::vector<RocPoint> points{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double cut = scores[order[i]];
    while (i < order.size() && scores[order[i]] == cut) {
      const Label l = labels[order[i]];
      if (l == Label::phish) ++tp;
      if (l == Label::ham) ++fp;
      ++i;
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                      static_cast<double>(tp) / static_cast<double>(pos), cut});
  }
  return points;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  if (labels.size() < k) {
    throw Error(ErrorCode::TooFewRows, std::to_string(labels.size()) + " rows cannot fill " +
                                           std::to_string(k) + " folds");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), 0);
  std::size_t cursor = 0;
  for (const Label cls : {Label::ham, Label::phish, Label::unlabeled}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) rows.push_back(i);
    }
    Rng rng(derive_seed(seed, kFoldStream, static_cast<std::uint64_t>(cls)));
    rng.shuffle(std::span<std::size_t>(rows));
    for (const auto r : rows) {
      plan.assignments[r] = cursor;
      cursor = (cursor + 1) % k;
    }
  }
  return plan;
}

void finalize_report(EvaluationReport& report) {
  const auto& cm = report.pooled;
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "no predictions to report");
  report.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());

  double auc = 0.0;
  const bool both = cm.positives() > 0 && cm.negatives() > 0;
  if (both) auc = roc_auc(report.scores, report.labels);

  auto phish = compute_metrics(cm);
  auto ham = compute_metrics(cm.flipped());
  if (both) {
    phish.roc_area = auc;
    ham.roc_area = auc;
  } else {
    phish.undefined.emplace_back("roc_area");
    ham.undefined.emplace_back("roc_area");
  }
  report.per_class[0] = {Label::ham, cm.negatives(), ham};
  report.per_class[1] = {Label::phish, cm.positives(), phish};
  const double n = static_cast<double>(cm.total());
  report.weighted_average = combine(ham, static_cast<double>(cm.negatives()) / n, phish,
                                    static_cast<double>(cm.positives()) / n);
  report.macro_average = combine(ham, 0.5, phish, 0.5);
}

EvaluationReport cross_validate(std::span<const ProcessedEmail> corpus, const ModelParams& params,
                                const CvOptions& options) {
  std::vector<Label> labels;
  labels.reserve(corpus.size());
  for (const auto& e : corpus) labels.push_back(e.label);
  const auto plan = stratified_folds(labels, options.k, options.seed);

  std::optional<PhishingLexicon> global;
  if (options.global_lexicon) global = lexicon_from(corpus);

  std::mutex hook_mutex;
  std::vector<FoldOutput> folds(options.k);
  parallel_for(options.k, options.jobs, [&](std::size_t fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    const PhishingLexicon lexicon = global ? *global : lexicon_from(corpus, train_idx);
    if (options.on_fold) {
      std::lock_guard lock(hook_mutex);
      options.on_fold(fold, lexicon, train_idx, test_idx);
    }
    const Dataset ds = build_dataset(corpus, lexicon, options.features);
    folds[fold] = run_fold(ds, fold, plan, params);
    folds[fold].result.lexicon_terms = lexicon.n_terms();
  });
  return assemble(std::move(folds), labels, params, options);
}

EvaluationReport cross_validate(const Dataset& ds, const ModelParams& params, const CvOptions& options) {
  const auto labels = ds.labels();
  const auto plan = stratified_folds(labels, options.k, options.seed);
  std::vector<FoldOutput> folds(options.k);
  parallel_for(options.k, options.jobs,
               [&](std::size_t fold) { folds[fold] = run_fold(ds, fold, plan, params); });
  CvOptions echo = options;
  echo.global_lexicon = false;
  return assemble(std::move(folds), labels, params, echo);
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["algorithm"] = report.algorithm;
  j["params"] = {{"trees", report.params.trees},
                 {"features_per_split", report.params.features_per_split},
                 {"min_leaf", report.params.min_leaf},
                 {"laplace_alpha", report.params.laplace_alpha},
                 {"variance_floor", report.params.variance_floor},
                 {"seed", report.params.seed},
                 {"ties_to_phish", report.params.ties_to_phish}};
  j["k"] = report.k;
  j["seed"] = report.seed;
  j["global_lexicon"] = report.global_lexicon;
  j["accuracy"] = report.accuracy;
  j["pooled"] = cm_json(report.pooled);
  j["per_class"] = nlohmann::ordered_json::object();
  for (const auto& c : report.per_class) {
    j["per_class"][std::string(to_string(c.label))] = {{"support", c.support},
                                                       {"metrics", metrics_json(c.metrics)}};
  }
  j["weighted_average"] = metrics_json(report.weighted_average);
  j["macro_average"] = metrics_json(report.macro_average);
  auto folds = nlohmann::ordered_json::array();
  for (const auto& f : report.per_fold) {
    folds.push_back({{"fold", f.fold},
                     {"train_rows", f.train_rows},
                     {"test_rows", f.test_rows},
                     {"lexicon_terms", f.lexicon_terms},
                     {"confusion", cm_json(f.cm)},
                     {"metrics", metrics_json(f.metrics)}});
  }
  j["per_fold"] = std::move(folds);
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvaluationReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s%10s%10s%11s%10s%11s%10s\n", "Class", "TP Rate", "FP Rate",
                "Precision", "Recall", "F-Measure", "ROC Area");
  out << "=== " << report.algorithm << ", " << report.k << "-fold cross-validation, seed "
      << report.seed << " ===\n"
      << "Accuracy: ";
  char acc[32];
  std::snprintf(acc, sizeof acc, "%.4f", report.accuracy);
  out << acc << "  (" << report.pooled.tp + report.pooled.tn << "/" << report.pooled.total() << ")\n\n"
      << line;
  auto row = [&](const char* name, const Metrics& m) {
    std::snprintf(line, sizeof line, "%-14s%10.3f%10.3f%11.3f%10.3f%11.3f%10.3f\n", name, m.tp_rate,
                  m.fp_rate, m.precision, m.recall, m.f_measure, m.roc_area);
    out << line;
  };
  row("ham", report.per_class[0].metrics);
  row("phish", report.per_class[1].metrics);
  row("Weighted Avg.", report.weighted_average);
  row("Macro Avg.", report.macro_average);
  return out.str();
}

std::string roc_to_csv(std::span<const RocPoint> points) {
  std::ostringstream out;
  out << "fpr,tpr,threshold\n";
  for (const auto& p : points) {
    out << format_real(p.fpr) << ',' << format_real(p.tpr) << ','
        << (std::isinf(p.threshold) ? std::string("inf") : format_real(p.threshold)) << '\n';
  }
  return out.str();
}

}  // namespace phishkd
