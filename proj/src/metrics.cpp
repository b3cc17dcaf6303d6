#include "nci/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nci {

std::size_t ConfusionTable::at(const std::string& gold, const std::string& predicted) const {
  auto row = counts.find(gold);
  if (row == counts.end()) return 0;
  auto cell = row->second.find(predicted);
  return cell == row->second.end() ? 0 : cell->second;
}

std::size_t ConfusionTable::total() const {
  std::size_t n = 0;
  for (const auto& [gold, row] : counts)
    for (const auto& [pred, c] : row) n += c;
  return n;
}

const LabelScore* LabelScores::find(const std::string& label) const {
  for (const auto& s : per_label)
    if (s.label == label) return &s;
  return nullptr;
}

ScoreResult score(std::span<const std::string> predicted, std::span<const std::string> gold, Taxonomy taxonomy) {
  if (predicted.size() != gold.size())
    throw InputError("metrics", "prediction and gold sequences differ in length (" +
                                    std::to_string(predicted.size()) + " vs " + std::to_string(gold.size()) + ")");
  ScoreResult r;
  r.confusion.taxonomy = taxonomy;
  r.scores.taxonomy = taxonomy;
  r.scores.total = gold.size();

  std::map<std::string, LabelScore> by_label;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++r.confusion.counts[gold[i]][predicted[i]];
    auto& g = by_label[gold[i]];
    auto& p = by_label[predicted[i]];
    ++g.support;
    if (gold[i] == predicted[i]) {
      ++g.tp;
      ++r.scores.correct;
    } else {
      ++g.fn;
      ++p.fp;
    }
  }
  r.scores.accuracy = gold.empty() ? 0.0 : static_cast<double>(r.scores.correct) / static_cast<double>(gold.size());

  for (auto& [label, s] : by_label) {
    s.label = label;
    s.precision = s.tp + s.fp == 0 ? 0.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    s.recall = s.tp + s.fn == 0 ? 0.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    r.scores.per_label.push_back(s);
  }
  std::stable_sort(r.scores.per_label.begin(), r.scores.per_label.end(),
                   [](const LabelScore& a, const LabelScore& b) { return a.support > b.support; });
  return r;
}

double macro_f1(const LabelScores& scores, const std::set<std::string>& subset) {
  if (subset.empty()) throw InputError("metrics", "macro-F1 over an empty label subset");
  double sum = 0.0;
  for (const auto& label : subset)
    if (const LabelScore* s = scores.find(label)) sum += s->f1;
  return sum / static_cast<double>(subset.size());
}

std::vector<std::string> PredictionFile::gold_labels() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.gold);
  return out;
}

std::vector<std::string> PredictionFile::predicted_labels() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.predicted);
  return out;
}

std::string serialize(const PredictionFile& file) {
  std::string out;
  char buf[40];
  for (const auto& r : file.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.prob);
    out += r.left + '\t' + r.right + '\t' + r.gold + '\t' + r.predicted + '\t' + buf + '\n';
  }
  return out;
}

PredictionFile parse_predictions(const std::string& text, Taxonomy taxonomy) {
  PredictionFile file;
  file.taxonomy = taxonomy;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 5)
      throw InputError("metrics", "prediction line " + std::to_string(line_no) + ": expected 5 columns");
    double prob = 0.0;
    auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), prob);
    if (ec != std::errc() || ptr != f[4].data() + f[4].size() || !std::isfinite(prob))
      throw InputError("metrics", "prediction line " + std::to_string(line_no) + ": bad probability");
    file.rows.push_back({f[0], f[1], f[2], f[3], prob});
  }
  return file;
}

PredictionFile read_predictions(const std::filesystem::path& path, Taxonomy taxonomy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("metrics", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_predictions(ss.str(), taxonomy);
}

void write_predictions(const PredictionFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("metrics", "cannot write " + path.string());
  out << serialize(file);
}

ScoreResult score(const PredictionFile& file) {
  const auto p = file.predicted_labels();
  const auto g = file.gold_labels();
  return score(p, g, file.taxonomy);
}

std::set<std::string> predicted_label_union(std::span<const PredictionFile> files) {
  if (files.empty()) throw InputError("metrics", "no prediction files");
  std::set<std::string> out;
  for (const auto& f : files) {
    if (f.taxonomy != files.front().taxonomy) throw InputError("metrics", "prediction files mix taxonomies");
    for (const auto& r : f.rows) out.insert(r.predicted);
  }
  return out;
}

}  // namespace nci
