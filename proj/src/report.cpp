#include "nci/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nci {

Json to_json(const VocabStats& s) {
  return {{"compounds", s.compounds}, {"vocab_size", s.vocab}, {"right_constituents", s.right},
          {"left_constituents", s.left}};
}

Json to_json(const std::vector<LabelFrequency>& dist) {
  Json out = Json::array();
  for (const auto& f : dist) out.push_back({{"label", f.label}, {"count", f.count}, {"fraction", f.fraction}});
  return out;
}

Json to_json(const EmbeddingLoadReport& r, const ResolvedVocab* vocab) {
  Json j = {{"loaded", r.loaded}, {"skipped", r.skipped}, {"duplicates", r.duplicates}};
  if (vocab) {
    Json rules = Json::object();
    for (auto rule : {ResolveRule::Exact, ResolveRule::Lowercase, ResolveRule::HyphenAverage, ResolveRule::Unknown})
      rules[to_string(rule)] = 0;
    for (const auto& [rule, n] : vocab->rule_counts()) rules[to_string(rule)] = n;
    j["resolution"] = rules;
    j["vocab_rows"] = vocab->size();
  }
  return j;
}

Json to_json(const TrainLog& log) {
  Json epochs = Json::array();
  for (const auto& e : log.epochs) {
    Json je = {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_accuracy", e.dev_accuracy}};
    if (e.aux_dev_accuracy) je["aux_dev_accuracy"] = *e.aux_dev_accuracy;
    epochs.push_back(je);
  }
  return {{"epochs", epochs}, {"best_epoch", log.best_epoch}, {"stopped_epoch", log.stopped_epoch},
          {"stop_reason", to_string(log.stop_reason)}};
}

TrainLog train_log_from_json(const Json& j) {
  TrainLog log;
  for (const auto& je : j.at("epochs")) {
    EpochRecord e;
    e.epoch = je.at("epoch").get<std::size_t>();
    e.train_loss = je.at("train_loss").get<double>();
    e.dev_accuracy = je.at("dev_accuracy").get<double>();
    if (je.contains("aux_dev_accuracy")) e.aux_dev_accuracy = je.at("aux_dev_accuracy").get<double>();
    log.epochs.push_back(e);
  }
  log.best_epoch = j.at("best_epoch").get<std::size_t>();
  log.stopped_epoch = j.at("stopped_epoch").get<std::size_t>();
  log.stop_reason = j.at("stop_reason").get<std::string>() == "early-stop" ? StopReason::EarlyStop : StopReason::MaxEpochs;
  return log;
}

Json to_json(const LabelScores& s) {
  Json labels = Json::array();
  for (const auto& l : s.per_label)
    labels.push_back({{"label", l.label}, {"tp", l.tp}, {"fp", l.fp}, {"fn", l.fn}, {"support", l.support},
                      {"precision", l.precision}, {"recall", l.recall}, {"f1", l.f1}});
  return {{"taxonomy", to_string(s.taxonomy)}, {"total", s.total}, {"correct", s.correct},
          {"accuracy", s.accuracy}, {"per_label", labels}};
}

Json to_json(const ConfusionTable& c) {
  Json counts = Json::object();
  for (const auto& [gold, row] : c.counts)
    for (const auto& [pred, n] : row) counts[gold][pred] = n;
  return {{"taxonomy", to_string(c.taxonomy)}, {"counts", counts}, {"total", c.total()}};
}

Json to_json(const CorrespondenceMatrix& m) {
  Json cols = Json::array();
  for (std::size_t c = 0; c < m.column_labels.size(); ++c) {
    Json cells = Json::object();
    for (std::size_t r = 0; r < m.row_labels.size(); ++r)
      cells[m.row_labels[r]] = m.cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    cols.push_back({{"label", m.column_labels[c]}, {"count", m.column_counts[c]}, {"cells", cells}});
  }
  return {{"column_taxonomy", to_string(m.columns)}, {"row_taxonomy", to_string(m.rows)},
          {"row_labels", m.row_labels}, {"columns", cols}};
}

Json to_json(const UnseenPartition& p) {
  return {{"total", p.total},
          {"unseen_left", {{"count", p.unseen_left.size()}, {"records", p.unseen_left}}},
          {"unseen_right", {{"count", p.unseen_right.size()}, {"records", p.unseen_right}}},
          {"unseen_both", {{"count", p.unseen_both.size()}, {"records", p.unseen_both}}}};
}

Json to_json(const GeneralizationError& e) {
  auto v = [](const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); };
  return {{"left", v(e.left)}, {"right", v(e.right)}, {"both", v(e.both)}};
}

Json to_json(const std::vector<RelationRatio>& ratios) {
  Json out = Json::array();
  for (const auto& r : ratios)
    out.push_back({{"label", r.label}, {"constituents", r.constituents}, {"specific", r.specific}, {"ratio", r.ratio}});
  return out;
}

std::string TextTable::render() const {
  std::vector<std::size_t> width(header_.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  };
  widen(header_);
  for (const auto& r : rows_) widen(r);

  std::size_t total = 0;
  for (std::size_t w : width) total += w + 2;
  auto line = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < row.size() ? row[i] : "";
      if (i == 0)
        s += cell + std::string(width[i] - cell.size(), ' ');
      else
        s += "  " + std::string(width[i] - cell.size(), ' ') + cell;
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + '\n';
  };
  std::string out = line(header_);
  out += std::string(total > 2 ? total - 2 : total, '-') + '\n';
  for (const auto& r : rows_) out += r.empty() ? std::string(total > 2 ? total - 2 : total, '-') + '\n' : line(r);
  return out;
}

std::string TextTable::to_tsv() const {
  auto line = [](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "\t" : "") + row[i];
    return s + '\n';
  };
  std::string out = line(header_);
  for (const auto& r : rows_)
    if (!r.empty()) out += line(r);
  return out;
}

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string percent(double fraction) { return fixed2(100.0 * fraction); }

std::string percent(const std::optional<double>& pct_value) { return pct_value ? fixed2(*pct_value) : "n/a"; }

TextTable vocab_stats_table(const std::vector<std::pair<std::string, VocabStats>>& splits) {
  std::vector<std::string> header{""};
  for (const auto& [name, s] : splits) header.push_back(name);
  TextTable t(header);
  auto row = [&](const char* label, auto field) {
    std::vector<std::string> r{label};
    for (const auto& [name, s] : splits) r.push_back(std::to_string(field(s)));
    t.add_row(r);
  };
  row("Compounds", [](const VocabStats& s) { return s.compounds; });
  row("Vocab size", [](const VocabStats& s) { return s.vocab; });
  row("Right constituents", [](const VocabStats& s) { return s.right; });
  row("Left constituents", [](const VocabStats& s) { return s.left; });
  return t;
}

TextTable correspondence_table(const CorrespondenceMatrix& m) {
  std::vector<std::string> header{""};
  header.insert(header.end(), m.column_labels.begin(), m.column_labels.end());
  TextTable t(header);
  for (std::size_t r = 0; r < m.row_labels.size(); ++r) {
    std::vector<std::string> row{m.row_labels[r]};
    for (std::size_t c = 0; c < m.column_labels.size(); ++c) {
      const double x = m.cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      row.push_back(x == 0.0 ? "-" : fixed2(x));
    }
    t.add_row(row);
  }
  t.add_rule();
  std::vector<std::string> counts{"Count"};
  for (std::size_t n : m.column_counts) counts.push_back(std::to_string(n));
  t.add_row(counts);
  return t;
}

std::string read_text_file(const std::filesystem::path& path, const char* module) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(module, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text, const char* module) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(module, "cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& j, const char* module) {
  write_text_file(path, j.dump(2) + '\n', module);
}

Json read_json_file(const std::filesystem::path& path, const char* module) {
  try {
    return Json::parse(read_text_file(path, module));
  } catch (const Json::exception& e) {
    throw InputError(module, "invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace nci
