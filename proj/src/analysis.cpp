#include "nci/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace nci {

double CorrespondenceMatrix::cell(const std::string& row, const std::string& col) const {
  auto r = std::find(row_labels.begin(), row_labels.end(), row);
  auto c = std::find(column_labels.begin(), column_labels.end(), col);
  if (r == row_labels.end() || c == column_labels.end()) return 0.0;
  return cells(r - row_labels.begin(), c - column_labels.begin());
}

std::size_t CorrespondenceMatrix::count(const std::string& col) const {
  auto c = std::find(column_labels.begin(), column_labels.end(), col);
  return c == column_labels.end() ? 0 : column_counts[static_cast<std::size_t>(c - column_labels.begin())];
}

CorrespondenceMatrix correspondence(const Split& train, Taxonomy from, Taxonomy to) {
  CorrespondenceMatrix m;
  m.columns = from;
  m.rows = to;
  for (const auto& f : label_distribution(train, from)) {
    m.column_labels.push_back(f.label);
    m.column_counts.push_back(f.count);
  }
  for (const auto& f : label_distribution(train, to)) m.row_labels.push_back(f.label);

  std::map<std::string, Eigen::Index> col_index, row_index;
  for (std::size_t i = 0; i < m.column_labels.size(); ++i) col_index[m.column_labels[i]] = static_cast<Eigen::Index>(i);
  for (std::size_t i = 0; i < m.row_labels.size(); ++i) row_index[m.row_labels[i]] = static_cast<Eigen::Index>(i);

  m.cells = Matrix::Zero(static_cast<Eigen::Index>(m.row_labels.size()), static_cast<Eigen::Index>(m.column_labels.size()));
  for (const auto& r : train.records) m.cells(row_index[r.label(to)], col_index[r.label(from)]) += 1.0;
  for (Eigen::Index c = 0; c < m.cells.cols(); ++c)
    m.cells.col(c) /= static_cast<double>(m.column_counts[static_cast<std::size_t>(c)]);
  return m;
}

const char* to_string(Side side) { return side == Side::Left ? "left" : "right"; }

UnseenPartition partition_unseen(const Split& test, const Split& train, bool any_position) {
  std::set<std::string> left_seen, right_seen;
  for (const auto& r : train.records) {
    left_seen.insert(r.left);
    right_seen.insert(r.right);
  }
  if (any_position) {
    left_seen.insert(right_seen.begin(), right_seen.end());
    right_seen = left_seen;
  }
  UnseenPartition p;
  p.total = test.size();
  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool l = !left_seen.contains(test.records[i].left);
    const bool r = !right_seen.contains(test.records[i].right);
    if (l) p.unseen_left.push_back(i);
    if (r) p.unseen_right.push_back(i);
    if (l && r) p.unseen_both.push_back(i);
  }
  return p;
}

namespace {

std::optional<double> error_rate(const std::vector<bool>& correct, const std::vector<std::size_t>& subset) {
  if (subset.empty()) return std::nullopt;
  std::size_t wrong = 0;
  for (std::size_t i : subset) {
    if (i >= correct.size()) throw InputError("analysis", "predictions do not cover the partitioned split");
    if (!correct[i]) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(subset.size());
}

const std::string& side_of(const CompoundRecord& r, Side side) { return side == Side::Left ? r.left : r.right; }

}  // namespace

GeneralizationError generalization_error(const std::vector<bool>& correct, const UnseenPartition& partition) {
  if (correct.size() != partition.total)
    throw InputError("analysis", "predictions are not aligned with the partitioned split");
  return {error_rate(correct, partition.unseen_left), error_rate(correct, partition.unseen_right),
          error_rate(correct, partition.unseen_both)};
}

GeneralizationError generalization_error(const PredictionFile& predictions, const UnseenPartition& partition) {
  std::vector<bool> correct;
  for (const auto& r : predictions.rows) correct.push_back(r.gold == r.predicted);
  return generalization_error(correct, partition);
}

std::vector<RelationRatio> relation_specific_ratio(const Split& train, Taxonomy taxonomy, Side side) {
  std::map<std::string, std::set<std::string>> labels_of;  // constituent -> labels
  std::map<std::string, std::set<std::string>> words_of;   // label -> constituents
  for (const auto& r : train.records) {
    labels_of[side_of(r, side)].insert(r.label(taxonomy));
    words_of[r.label(taxonomy)].insert(side_of(r, side));
  }
  std::vector<RelationRatio> out;
  for (const auto& f : label_distribution(train, taxonomy)) {
    const auto& words = words_of[f.label];
    if (words.empty()) continue;
    RelationRatio rr{f.label, words.size(), 0, 0.0};
    for (const auto& w : words)
      if (labels_of[w].size() == 1) ++rr.specific;
    rr.ratio = static_cast<double>(rr.specific) / static_cast<double>(rr.constituents);
    out.push_back(rr);
  }
  return out;
}

double lexical_overlap(const Split& train, Taxonomy taxonomy, const std::string& label_a,
                       const std::string& label_b, Side side) {
  std::set<std::string> a_words, b_words;
  for (const auto& r : train.records) {
    if (r.label(taxonomy) == label_a) a_words.insert(side_of(r, side));
    if (r.label(taxonomy) == label_b) b_words.insert(side_of(r, side));
  }
  if (a_words.empty()) throw InputError("analysis", "label '" + label_a + "' does not occur in " + train.name);
  std::size_t shared = 0;
  for (const auto& w : a_words)
    if (b_words.contains(w)) ++shared;
  return static_cast<double>(shared) / static_cast<double>(a_words.size());
}

}  // namespace nci
