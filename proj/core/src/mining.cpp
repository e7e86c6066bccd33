#include "phishkd/mining.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "phishkd/error.hpp"

namespace phishkd {
namespace {

// Gains closer than this are treated as equal when choosing thresholds.
constexpr double kGainTolerance = 1e-12;

using Counts = std::array<std::size_t, 2>;

std::size_t class_index(Label label) {
  if (label == Label::unlabeled) throw Error(ErrorCode::InvalidArgument, "unlabeled row");
  return static_cast<std::size_t>(label);
}

double entropy2(const Counts& c) {
  const std::size_t n = c[0] + c[1];
  if (n == 0) return 0.0;
  double h = 0.0;
  for (const auto k : c) {
    if (k == 0) continue;
    const double p = static_cast<double>(k) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

double split_information(std::span<const std::size_t> sizes, std::size_t n) {
  double h = 0.0;
  for (const auto k : sizes) {
    if (k == 0) continue;
    const double p = static_cast<double>(k) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

void check_columns(std::span<const double> values, std::span<const Label> labels) {
  if (values.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(values.size()) + " values vs " +
                                               std::to_string(labels.size()) + " labels");
  }
  if (values.empty()) throw Error(ErrorCode::EmptyDataset, "empty column");
}

struct NominalGroups {
  std::map<double, Counts> groups;
  Counts total{};
};

NominalGroups group_by_value(std::span<const double> values, std::span<const Label> labels) {
  NominalGroups g;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto c = class_index(labels[i]);
    ++g.groups[values[i]][c];
    ++g.total[c];
  }
  return g;
}

double nominal_gain(const NominalGroups& g, std::size_t n) {
  double conditional = 0.0;
  for (const auto& [value, counts] : g.groups) {
    conditional += static_cast<double>(counts[0] + counts[1]) / static_cast<double>(n) * entropy2(counts);
  }
  const double h = entropy2(g.total);
  return std::clamp(h - conditional, 0.0, h);
}

}  // namespace

double entropy(std::span<const double> class_counts) {
  const double total = std::accumulate(class_counts.begin(), class_counts.end(), 0.0);
  if (total <= 0.0) throw Error(ErrorCode::AllZero, "entropy of an all-zero count vector");
  double h = 0.0;
  for (const double k : class_counts) {
    if (k < 0.0) throw Error(ErrorCode::InvalidArgument, "negative class count");
    if (k == 0.0) continue;
    const double p = k / total;
    h -= p * std::log2(p);
  }
  return h;
}

double entropy(std::span<const std::size_t> class_counts) {
  std::vector<double> as_double(class_counts.begin(), class_counts.end());
  return entropy(std::span<const double>(as_double));
}

std::optional<BinarySplit> best_threshold_split(std::span<const double> values,
                                                std::span<const Label> labels,
                                                std::size_t min_leaf) {
  check_columns(values, labels);
  const std::size_t n = values.size();
  min_leaf = std::max<std::size_t>(min_leaf, 1);

  std::vector<std::pair<double, std::size_t>> sorted(n);
  Counts total{};
  for (std::size_t i = 0; i < n; ++i) {
    sorted[i] = {values[i], class_index(labels[i])};
    ++total[sorted[i].second];
  }
  std::sort(sorted.begin(), sorted.end());
  const double parent = entropy2(total);

  std::optional<BinarySplit> best;
  Counts left{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ++left[sorted[i].second];
    const double lo = sorted[i].first;
    const double hi = sorted[i + 1].first;
    if (!(lo < hi)) continue;
    const std::size_t nl = i + 1;
    const std::size_t nr = n - nl;
    if (nl < min_leaf || nr < min_leaf) continue;
    const Counts right{total[0] - left[0], total[1] - left[1]};
    const double conditional = (static_cast<double>(nl) * entropy2(left) +
                                static_cast<double>(nr) * entropy2(right)) /
                               static_cast<double>(n);
    const double gain = std::clamp(parent - conditional, 0.0, parent);
    if (best && !(gain > best->gain + kGainTolerance)) continue;
    double threshold = lo + (hi - lo) / 2.0;
    if (!(threshold < hi)) threshold = lo;
    const std::array<std::size_t, 2> sizes{nl, nr};
    const double si = split_information(sizes, n);
    best = BinarySplit{threshold, gain, si > 0.0 ? gain / si : 0.0, nl, nr};
  }
  return best;
}

GainResult info_gain(std::span<const double> values, std::span<const Label> labels,
                     FeatureKind kind) {
  check_columns(values, labels);
  if (kind == FeatureKind::binary) {
    return {nominal_gain(group_by_value(values, labels), values.size()), std::nullopt};
  }
  const auto split = best_threshold_split(values, labels, 1);
  if (!split) return {0.0, std::nullopt};
  return {split->gain, split->threshold};
}

double gain_ratio(std::span<const double> values, std::span<const Label> labels,
                  FeatureKind kind) {
  check_columns(values, labels);
  const std::size_t n = values.size();
  if (kind == FeatureKind::binary) {
    const auto g = group_by_value(values, labels);
    std::vector<std::size_t> sizes;
    for (const auto& [value, counts] : g.groups) sizes.push_back(counts[0] + counts[1]);
    const double si = split_information(sizes, n);
    return si > 0.0 ? nominal_gain(g, n) / si : 0.0;
  }
  const auto split = best_threshold_split(values, labels, 1);
  return split ? split->ratio : 0.0;
}

FeatureRanking rank_features(const Dataset& ds) {
  if (ds.size() < 2) throw Error(ErrorCode::EmptyDataset, "ranking needs at least two rows");
  if (ds.count(Label::ham) == 0 || ds.count(Label::phish) == 0) {
    throw Error(ErrorCode::SingleClass, "ranking needs both classes");
  }
  const auto labels = ds.labels();
  FeatureRanking ranking;
  for (std::size_t j = 0; j < ds.arity(); ++j) {
    const auto column = ds.column(j);
    const auto gain = info_gain(column, labels, ds.kinds[j]);
    ranking.entries.push_back({ds.feature_names[j], j, gain.ig, gain.threshold});
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedFeature& a, const RankedFeature& b) { return a.ig > b.ig; });
  return ranking;
}

std::string to_tsv(const FeatureRanking& ranking) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  for (const auto& e : ranking.entries) {
    out << e.name << '\t' << e.ig << '\t';
    if (e.threshold) out << format_real(*e.threshold);
    out << '\n';
  }
  return out.str();
}

}  // namespace phishkd
