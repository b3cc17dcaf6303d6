#include <algorithm>
#include <map>
#include <set>

#include "nci/analysis.hpp"
#include "nci/experiment.hpp"

namespace nci {
namespace {

struct Entry {
  std::string row;  // table row label
  std::string bundle;
  ModelKind kind = ModelKind::Stl;
  Taxonomy taxonomy = Taxonomy::A;
  std::map<std::string, PredictionFile> files;  // split -> predictions
  std::string data_dir;
};

int kind_rank(ModelKind k) { return static_cast<int>(k); }

std::vector<Entry> load_entries(const std::vector<std::filesystem::path>& bundles) {
  std::vector<Entry> out;
  for (const auto& dir : bundles) {
    if (!std::filesystem::exists(dir / "manifest.json"))
      throw InputError("cli", "not a results bundle (no manifest.json): " + dir.string());
    const Json manifest = read_json_file(dir / "manifest.json", "cli");
    const Json config = read_json_file(dir / "config.json", "cli");
    for (const auto& task : manifest.at("tasks")) {
      if (task.at("role").get<std::string>() != "primary") continue;
      Entry e;
      e.kind = parse_model_kind(manifest.at("model").get<std::string>());
      e.row = display_name(e.kind);
      e.bundle = dir.string();
      e.taxonomy = parse_taxonomy(task.at("taxonomy").get<std::string>());
      e.data_dir = config.value("data_dir", std::string());
      for (const auto& [split, file] : task.at("predictions").items())
        e.files[split] = read_predictions(dir / file.get<std::string>(), e.taxonomy);
      out.push_back(std::move(e));
    }
  }
  // Disambiguate repeated (model, taxonomy) rows by bundle name.
  std::map<std::pair<std::string, Taxonomy>, int> seen;
  for (const auto& e : out) ++seen[{e.row, e.taxonomy}];
  for (auto& e : out)
    if (seen[{e.row, e.taxonomy}] > 1) e.row += " [" + std::filesystem::path(e.bundle).filename().string() + "]";
  std::stable_sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return kind_rank(a.kind) < kind_rank(b.kind); });
  return out;
}

bool same_items(const PredictionFile& a, const PredictionFile& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    if (a.rows[i].left != b.rows[i].left || a.rows[i].right != b.rows[i].right || a.rows[i].gold != b.rows[i].gold)
      return false;
  return true;
}

std::vector<std::string> row_order(const std::vector<Entry>& entries) {
  std::vector<std::string> rows;
  for (const auto& e : entries)
    if (std::find(rows.begin(), rows.end(), e.row) == rows.end()) rows.push_back(e.row);
  return rows;
}

}  // namespace

std::string run_report(const ReportOptions& opts) {
  if (opts.bundles.empty()) throw InputError("cli", "report needs at least one bundle");
  std::vector<Entry> entries = load_entries(opts.bundles);
  std::filesystem::create_directories(opts.out_dir);
  if (opts.task) {
    for (const auto& e : entries)
      if (e.taxonomy != *opts.task)
        throw InputError("cli", "bundle " + e.bundle + " predicts taxonomy " + to_string(e.taxonomy) +
                                    ", expected only " + to_string(*opts.task));
  }
  if (entries.empty()) throw InputError("cli", "no primary predictions found in the given bundles");

  std::vector<Taxonomy> taxonomies;
  for (Taxonomy t : {Taxonomy::A, Taxonomy::B})
    if (std::any_of(entries.begin(), entries.end(), [&](const Entry& e) { return e.taxonomy == t; }))
      taxonomies.push_back(t);

  const auto rows = row_order(entries);
  Json report;
  std::string text;

  // Accuracy (dev / test) per model and taxonomy.
  std::vector<std::string> acc_header{"Model"};
  for (Taxonomy t : taxonomies) {
    acc_header.push_back(std::string(to_string(t)) + " Dev");
    acc_header.push_back(std::string(to_string(t)) + " Test");
  }
  TextTable acc(acc_header);
  for (const auto& row : rows) {
    std::vector<std::string> cells{row};
    for (Taxonomy t : taxonomies)
      for (const char* split : {"dev", "test"}) {
        std::string cell = "-";
        for (const auto& e : entries)
          if (e.row == row && e.taxonomy == t && e.files.contains(split))
            cell = percent(score(e.files.at(split)).scores.accuracy);
        cells.push_back(cell);
      }
    acc.add_row(cells);
  }
  text += "Accuracy (%)\n\n" + acc.render();
  write_text_file(opts.out_dir / "accuracy.tsv", acc.to_tsv(), "cli");

  std::vector<std::string> macro_header{"Model"};
  for (Taxonomy t : taxonomies) macro_header.push_back(to_string(t));
  TextTable macro(macro_header);
  std::map<std::string, std::map<Taxonomy, std::string>> macro_cells;

  std::vector<std::string> gen_header{"Model"};
  for (Taxonomy t : taxonomies)
    for (const char* s : {" L", " R", " L&R"}) gen_header.push_back(std::string(to_string(t)) + s);
  TextTable gen(gen_header);
  std::map<std::string, std::map<Taxonomy, GeneralizationError>> gen_cells;
  std::map<Taxonomy, UnseenPartition> partitions;

  for (Taxonomy t : taxonomies) {
    const std::string tn = to_string(t);
    std::vector<const Entry*> group;
    for (const auto& e : entries)
      if (e.taxonomy == t) group.push_back(&e);
    const bool all_test = std::all_of(group.begin(), group.end(), [](const Entry* e) { return e->files.contains("test"); });
    const std::string split = all_test ? "test" : "dev";

    std::vector<PredictionFile> files;
    for (const Entry* e : group) {
      if (!e->files.contains(split)) throw InputError("cli", "bundle " + e->bundle + " has no " + split + " predictions");
      files.push_back(e->files.at(split));
      if (!same_items(files.front(), files.back()))
        throw InputError("cli", "bundles were evaluated on different " + split + " data (taxonomy " + tn + ")");
    }
    const std::set<std::string> subset = predicted_label_union(files);
    Json& jt = report["taxonomies"][tn];
    jt["split"] = split;
    jt["label_subset"] = subset;

    // Per-label F1 columns: subset labels by descending gold count.
    const ScoreResult ref = score(files.front());
    std::vector<std::string> cols;
    for (const auto& ls : ref.scores.per_label)
      if (subset.contains(ls.label)) cols.push_back(ls.label);
    for (const auto& l : subset)
      if (std::find(cols.begin(), cols.end(), l) == cols.end()) cols.push_back(l);

    std::vector<std::string> f1_header{""};
    f1_header.insert(f1_header.end(), cols.begin(), cols.end());
    TextTable f1(f1_header);
    std::vector<std::string> count_row{"Count"};
    for (const auto& c : cols) {
      const LabelScore* s = ref.scores.find(c);
      count_row.push_back(std::to_string(s ? s->support : 0));
    }
    f1.add_row(count_row);
    f1.add_rule();

    // Unseen-constituent partition of the evaluated split.
    const std::filesystem::path data_dir = opts.data_dir ? *opts.data_dir : std::filesystem::path(group.front()->data_dir);
    const Split train = load_split(data_dir / "train.tsv", "train");
    const Split eval = load_split(data_dir / (split + ".tsv"), split);
    if (eval.size() != files.front().rows.size())
      throw InputError("cli", "predictions do not match " + (data_dir / (split + ".tsv")).string());
    for (std::size_t i = 0; i < eval.size(); ++i)
      if (eval.records[i].left != files.front().rows[i].left || eval.records[i].right != files.front().rows[i].right)
        throw InputError("cli", "predictions do not match " + (data_dir / (split + ".tsv")).string());
    const UnseenPartition part = partition_unseen(eval, train);
    partitions[t] = part;
    jt["unseen_counts"] = {{"left", part.unseen_left.size()}, {"right", part.unseen_right.size()},
                           {"both", part.unseen_both.size()}};

    for (std::size_t i = 0; i < group.size(); ++i) {
      const Entry& e = *group[i];
      const ScoreResult sr = score(files[i]);
      std::vector<std::string> r{e.row};
      Json per_label = Json::object();
      for (const auto& c : cols) {
        const LabelScore* s = sr.scores.find(c);
        const double v = s ? s->f1 : 0.0;
        r.push_back(percent(v));
        per_label[c] = v;
      }
      f1.add_row(r);
      const double m = macro_f1(sr.scores, subset);
      macro_cells[e.row][t] = percent(m);
      const GeneralizationError ge = generalization_error(files[i], part);
      gen_cells[e.row][t] = ge;

      Json je = {{"model", e.row}, {"bundle", e.bundle}, {"macro_f1", m}, {"per_label_f1", per_label},
                 {"scores", to_json(sr.scores)}, {"generalization_error", to_json(ge)}};
      for (const auto& [s, f] : e.files) je["accuracy"][s] = score(f).scores.accuracy;
      jt["entries"].push_back(je);
    }
    text += "\nPer-label F1 (%), taxonomy " + tn + ", " + split + " split\n\n" + f1.render();
    write_text_file(opts.out_dir / ("per_label_f1_" + tn + ".tsv"), f1.to_tsv(), "cli");
  }

  for (const auto& row : rows) {
    std::vector<std::string> cells{row};
    for (Taxonomy t : taxonomies) cells.push_back(macro_cells[row].contains(t) ? macro_cells[row][t] : "-");
    macro.add_row(cells);
  }
  std::string subsets;
  for (Taxonomy t : taxonomies) {
    subsets += std::string("  ") + to_string(t) + ":";
    for (const auto& l : report["taxonomies"][to_string(t)]["label_subset"]) subsets += " " + l.get<std::string>();
    subsets += "\n";
  }
  text += "\nMacro-average F1 (%) over labels predicted by at least one model\n\n" + macro.render() +
          "label subsets:\n" + subsets;
  write_text_file(opts.out_dir / "macro_f1.tsv", macro.to_tsv(), "cli");

  std::vector<std::string> count_row{"Count"};
  for (Taxonomy t : taxonomies) {
    const auto& p = partitions[t];
    count_row.push_back(std::to_string(p.unseen_left.size()));
    count_row.push_back(std::to_string(p.unseen_right.size()));
    count_row.push_back(std::to_string(p.unseen_both.size()));
  }
  gen.add_row(count_row);
  gen.add_rule();
  for (const auto& row : rows) {
    std::vector<std::string> cells{row};
    for (Taxonomy t : taxonomies) {
      if (!gen_cells[row].contains(t)) {
        cells.insert(cells.end(), {"-", "-", "-"});
        continue;
      }
      const auto& g = gen_cells[row][t];
      cells.push_back(percent(g.left));
      cells.push_back(percent(g.right));
      cells.push_back(percent(g.both));
    }
    gen.add_row(cells);
  }
  text += "\nGeneralization error (%) on unseen compounds\n\n" + gen.render();
  write_text_file(opts.out_dir / "generalization.tsv", gen.to_tsv(), "cli");

  write_json_file(opts.out_dir / "report.json", report, "cli");
  write_text_file(opts.out_dir / "report.txt", text, "cli");
  return text;
}

}  // namespace nci
