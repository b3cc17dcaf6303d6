#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nci/types.hpp"

namespace nci {

// One two-word compound type with a label from each taxonomy.
struct CompoundRecord {
  std::string left;
  std::string right;
  std::string label_a;
  std::string label_b;

  const std::string& label(Taxonomy t) const { return t == Taxonomy::A ? label_a : label_b; }
  bool operator==(const CompoundRecord&) const = default;
};

struct Split {
  std::string name;
  std::vector<CompoundRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

struct Corpus {
  Split train;
  Split dev;
  Split test;
};

// Parses the 4-column TSV (left, right, label_a, label_b; no header).
// Throws InputError with line numbers on malformed lines or duplicate types.
Split parse_split(const std::string& text, const std::string& name);
Split load_split(const std::filesystem::path& path, const std::string& name);

// Loads train.tsv, dev.tsv and test.tsv from a directory.
Corpus load_corpus(const std::filesystem::path& dir);

std::string serialize(const Split& split);
void write_split(const Split& split, const std::filesystem::path& path);

// Class indices for one taxonomy, ordered by descending train frequency with
// lexicographic tie-break. Labels absent from train have no index.
class LabelSpace {
 public:
  LabelSpace() = default;
  LabelSpace(Taxonomy taxonomy, std::vector<std::string> labels);

  static LabelSpace from_train(const Split& train, Taxonomy taxonomy);

  Taxonomy taxonomy() const { return taxonomy_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  std::optional<std::size_t> find(const std::string& label) const;

 private:
  Taxonomy taxonomy_ = Taxonomy::A;
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> index_of_;
};

struct VocabStats {
  std::size_t compounds = 0;
  std::size_t vocab = 0;
  std::size_t right = 0;
  std::size_t left = 0;

  bool operator==(const VocabStats&) const = default;
};

VocabStats vocab_stats(const Split& split);

struct LabelFrequency {
  std::string label;
  std::size_t count = 0;
  double fraction = 0.0;
};

// Descending count, ties broken lexicographically.
std::vector<LabelFrequency> label_distribution(const Split& split, Taxonomy taxonomy);

}  // namespace nci
