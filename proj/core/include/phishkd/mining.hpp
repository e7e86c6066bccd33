#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishkd/corpus.hpp"
#include "phishkd/features.hpp"

namespace phishkd {

// Shannon entropy in bits; zero counts contribute nothing. Throws AllZero.
double entropy(std::span<const double> class_counts);
double entropy(std::span<const std::size_t> class_counts);

struct GainResult {
  double ig = 0.0;                   // bits
  std::optional<double> threshold;  // numeric features only: split is value <= threshold

  bool operator==(const GainResult&) const = default;
};

// binary: nominal split on each distinct value. numeric: best "<= midpoint"
// split over all midpoints of consecutive distinct values; ties go to the
// smallest threshold. Throws LengthMismatch, EmptyDataset.
GainResult info_gain(std::span<const double> values, std::span<const Label> labels,
                     FeatureKind kind);

// info_gain divided by the entropy of the partition sizes; 0 when that is 0.
double gain_ratio(std::span<const double> values, std::span<const Label> labels,
                  FeatureKind kind);

struct BinarySplit {
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
  std::size_t left = 0;  // rows with value <= threshold
  std::size_t right = 0;
};

// Best threshold split leaving at least min_leaf rows on each side, chosen by
// information gain (ties to the smallest threshold). None when no admissible
// split exists.
std::optional<BinarySplit> best_threshold_split(std::span<const double> values,
                                                std::span<const Label> labels,
                                                std::size_t min_leaf = 1);

struct RankedFeature {
  std::string name;
  std::size_t index = 0;
  double ig = 0.0;
  std::optional<double> threshold;

  bool operator==(const RankedFeature&) const = default;
};

struct FeatureRanking {
  std::vector<RankedFeature> entries;  // ig descending, ties in column order

  bool operator==(const FeatureRanking&) const = default;
};

// Throws SingleClass unless both classes are present, EmptyDataset on < 2 rows.
FeatureRanking rank_features(const Dataset& ds);

// "feature<TAB>ig<TAB>threshold" per line; threshold is empty for nominal.
std::string to_tsv(const FeatureRanking& ranking);

}  // namespace phishkd
