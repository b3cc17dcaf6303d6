#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nci/analysis.hpp"
#include "nci/corpus.hpp"
#include "nci/embeddings.hpp"
#include "nci/metrics.hpp"
#include "nci/trainer.hpp"

namespace nci {

using Json = nlohmann::json;

// JSON views. Doubles are written at full precision.
Json to_json(const VocabStats& s);
Json to_json(const std::vector<LabelFrequency>& dist);
Json to_json(const EmbeddingLoadReport& r, const ResolvedVocab* vocab = nullptr);
Json to_json(const TrainLog& log);
Json to_json(const LabelScores& s);
Json to_json(const ConfusionTable& c);
Json to_json(const CorrespondenceMatrix& m);
Json to_json(const UnseenPartition& p);
Json to_json(const GeneralizationError& e);
Json to_json(const std::vector<RelationRatio>& ratios);

TrainLog train_log_from_json(const Json& j);

// Plain-text tables with columns padded to a common width.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void add_rule() { rows_.push_back({}); }
  std::string render() const;
  std::string to_tsv() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Percentage with two decimals, e.g. 0.7675 -> "76.75".
std::string percent(double fraction);
std::string percent(const std::optional<double>& pct_value);  // already a percentage
std::string fixed2(double x);

// Rows Compounds / Vocab size / Right constituents / Left constituents,
// one column per split.
TextTable vocab_stats_table(const std::vector<std::pair<std::string, VocabStats>>& splits);

// Cells with two decimals; "-" marks exact zeros; a trailing Count row.
TextTable correspondence_table(const CorrespondenceMatrix& m);

std::string read_text_file(const std::filesystem::path& path, const char* module);
void write_text_file(const std::filesystem::path& path, const std::string& text, const char* module);
void write_json_file(const std::filesystem::path& path, const Json& j, const char* module);
Json read_json_file(const std::filesystem::path& path, const char* module);

}  // namespace nci
