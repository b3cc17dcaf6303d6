#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nci/corpus.hpp"
#include "nci/metrics.hpp"
#include "nci/types.hpp"

namespace nci {

// cells(r, c) = P(row label r | column label c) over one split. Columns are
// labels of `columns`, rows labels of `rows`; both ordered by descending
// frequency, ties lexicographic.
struct CorrespondenceMatrix {
  Taxonomy columns = Taxonomy::B;
  Taxonomy rows = Taxonomy::A;
  std::vector<std::string> column_labels;
  std::vector<std::string> row_labels;
  std::vector<std::size_t> column_counts;
  Matrix cells;

  double cell(const std::string& row, const std::string& col) const;
  std::size_t count(const std::string& col) const;
};

CorrespondenceMatrix correspondence(const Split& train, Taxonomy from, Taxonomy to);

enum class Side { Left, Right };

const char* to_string(Side side);

// Record indices of test compounds whose constituents are unseen in train.
// Positional by default: a left constituent counts as seen only if it
// occurs in the left position of some train compound.
struct UnseenPartition {
  std::vector<std::size_t> unseen_left;
  std::vector<std::size_t> unseen_right;
  std::vector<std::size_t> unseen_both;
  std::size_t total = 0;
};

UnseenPartition partition_unseen(const Split& test, const Split& train, bool any_position = false);

// Misclassification percentage per subset; nullopt for an empty subset.
struct GeneralizationError {
  std::optional<double> left;
  std::optional<double> right;
  std::optional<double> both;
};

GeneralizationError generalization_error(const std::vector<bool>& correct, const UnseenPartition& partition);
GeneralizationError generalization_error(const PredictionFile& predictions, const UnseenPartition& partition);

struct RelationRatio {
  std::string label;
  std::size_t constituents = 0;  // distinct side-constituent types
  std::size_t specific = 0;      // of those, types seen with no other label
  double ratio = 0.0;
};

// Labels ordered by descending frequency; labels without constituents omitted.
std::vector<RelationRatio> relation_specific_ratio(const Split& train, Taxonomy taxonomy, Side side);

// Fraction of label_a's distinct side-constituent types that also occur in
// compounds labeled label_b. Throws InputError if label_a does not occur.
double lexical_overlap(const Split& train, Taxonomy taxonomy, const std::string& label_a,
                       const std::string& label_b, Side side);

}  // namespace nci
