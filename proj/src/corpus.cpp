#include "nci/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace nci {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool has_whitespace(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string read_file(const std::filesystem::path& path, const char* module) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(module, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Split parse_split(const std::string& text, const std::string& name) {
  Split split{name, {}};
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto where = name + " line " + std::to_string(line_no);
    auto fields = split_tabs(line);
    if (fields.size() != 4)
      throw InputError("corpus", where + ": expected 4 tab-separated columns, found " + std::to_string(fields.size()));
    for (const auto& f : fields)
      if (f.empty()) throw InputError("corpus", where + ": empty field");
    if (has_whitespace(fields[0]) || has_whitespace(fields[1]))
      throw InputError("corpus", where + ": constituent contains whitespace");

    auto [it, inserted] = seen.emplace(std::make_pair(fields[0], fields[1]), line_no);
    if (!inserted)
      throw InputError("corpus", name + ": duplicate compound '" + fields[0] + " " + fields[1] + "' on lines " +
                                     std::to_string(it->second) + " and " + std::to_string(line_no));
    split.records.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2]), std::move(fields[3])});
  }
  return split;
}

Split load_split(const std::filesystem::path& path, const std::string& name) {
  if (!std::filesystem::exists(path)) throw InputError("corpus", "missing split file " + path.string());
  return parse_split(read_file(path, "corpus"), name);
}

Corpus load_corpus(const std::filesystem::path& dir) {
  return {load_split(dir / "train.tsv", "train"), load_split(dir / "dev.tsv", "dev"),
          load_split(dir / "test.tsv", "test")};
}

std::string serialize(const Split& split) {
  std::string out;
  for (const auto& r : split.records) out += r.left + '\t' + r.right + '\t' + r.label_a + '\t' + r.label_b + '\n';
  return out;
}

void write_split(const Split& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("corpus", "cannot write " + path.string());
  out << serialize(split);
}

LabelSpace::LabelSpace(Taxonomy taxonomy, std::vector<std::string> labels)
    : taxonomy_(taxonomy), labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (!index_of_.emplace(labels_[i], i).second) throw InternalError("corpus", "duplicate label " + labels_[i]);
}

LabelSpace LabelSpace::from_train(const Split& train, Taxonomy taxonomy) {
  std::vector<std::string> labels;
  for (const auto& f : label_distribution(train, taxonomy)) labels.push_back(f.label);
  return LabelSpace(taxonomy, std::move(labels));
}

std::optional<std::size_t> LabelSpace::find(const std::string& label) const {
  auto it = index_of_.find(label);
  if (it == index_of_.end()) return std::nullopt;
  return it->second;
}

VocabStats vocab_stats(const Split& split) {
  std::set<std::string> all, left, right;
  for (const auto& r : split.records) {
    left.insert(r.left);
    right.insert(r.right);
    all.insert(r.left);
    all.insert(r.right);
  }
  return {split.size(), all.size(), right.size(), left.size()};
}

std::vector<LabelFrequency> label_distribution(const Split& split, Taxonomy taxonomy) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : split.records) ++counts[r.label(taxonomy)];
  std::vector<LabelFrequency> out;
  for (const auto& [label, n] : counts)
    out.push_back({label, n, static_cast<double>(n) / static_cast<double>(split.size())});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  return out;
}

}  // namespace nci
