#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nci/types.hpp"

namespace nci {

// gold label -> predicted label -> count
struct ConfusionTable {
  Taxonomy taxonomy = Taxonomy::A;
  std::map<std::string, std::map<std::string, std::size_t>> counts;

  std::size_t at(const std::string& gold, const std::string& predicted) const;
  std::size_t total() const;
};

struct LabelScore {
  std::string label;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t support = 0;  // gold count
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct LabelScores {
  Taxonomy taxonomy = Taxonomy::A;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  // Every label seen as gold or prediction; descending support, then name.
  std::vector<LabelScore> per_label;

  const LabelScore* find(const std::string& label) const;
};

struct ScoreResult {
  LabelScores scores;
  ConfusionTable confusion;
};

// Zero denominators give 0 for precision, recall and F1.
ScoreResult score(std::span<const std::string> predicted, std::span<const std::string> gold, Taxonomy taxonomy);

// Unweighted mean F1 over `subset`; labels never seen score 0.
double macro_f1(const LabelScores& scores, const std::set<std::string>& subset);

struct PredictionRow {
  std::string left;
  std::string right;
  std::string gold;
  std::string predicted;
  double prob = 0.0;  // probability of the predicted label
};

// TSV `left right gold predicted prob_of_predicted`, no header.
struct PredictionFile {
  Taxonomy taxonomy = Taxonomy::A;
  std::vector<PredictionRow> rows;

  std::vector<std::string> gold_labels() const;
  std::vector<std::string> predicted_labels() const;
};

std::string serialize(const PredictionFile& file);
PredictionFile parse_predictions(const std::string& text, Taxonomy taxonomy);
PredictionFile read_predictions(const std::filesystem::path& path, Taxonomy taxonomy);
void write_predictions(const PredictionFile& file, const std::filesystem::path& path);

ScoreResult score(const PredictionFile& file);

// Labels predicted by at least one file. All files must share one taxonomy.
std::set<std::string> predicted_label_union(std::span<const PredictionFile> files);

}  // namespace nci
