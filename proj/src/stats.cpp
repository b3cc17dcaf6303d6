#include <cstdio>
#include <map>

#include "nci/analysis.hpp"
#include "nci/experiment.hpp"

namespace nci {
namespace {

std::string full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// label, then count and fraction per split; labels in train order first.
TextTable distribution_table(const Corpus& corpus, Taxonomy t) {
  const Split* splits[] = {&corpus.train, &corpus.dev, &corpus.test};
  std::vector<std::string> order;
  std::map<std::string, std::array<std::size_t, 3>> counts;
  for (std::size_t s = 0; s < 3; ++s)
    for (const auto& f : label_distribution(*splits[s], t)) {
      if (!counts.contains(f.label)) order.push_back(f.label);
      counts[f.label][s] = f.count;
    }
  TextTable table({"label", "train", "train_fraction", "dev", "dev_fraction", "test", "test_fraction"});
  for (const auto& label : order) {
    std::vector<std::string> row{label};
    for (std::size_t s = 0; s < 3; ++s) {
      const std::size_t n = counts[label][s];
      row.push_back(std::to_string(n));
      row.push_back(splits[s]->empty() ? "0" : full(static_cast<double>(n) / static_cast<double>(splits[s]->size())));
    }
    table.add_row(row);
  }
  return table;
}

}  // namespace

void run_stats(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir) {
  const Corpus corpus = load_corpus(data_dir);
  std::filesystem::create_directories(out_dir);

  Json j;
  std::vector<std::pair<std::string, VocabStats>> stats = {
      {"Train", vocab_stats(corpus.train)}, {"Dev", vocab_stats(corpus.dev)}, {"Test", vocab_stats(corpus.test)}};
  for (const auto& [name, s] : stats) j["splits"][name == "Train" ? "train" : name == "Dev" ? "dev" : "test"] = to_json(s);

  std::string text = "Dataset characteristics\n\n" + vocab_stats_table(stats).render();

  for (Taxonomy t : {Taxonomy::A, Taxonomy::B}) {
    const std::string tn = to_string(t);
    for (const Split* s : {&corpus.train, &corpus.dev, &corpus.test})
      j["distributions"][tn][s->name] = to_json(label_distribution(*s, t));
    const TextTable dist = distribution_table(corpus, t);
    write_text_file(out_dir / ("distribution_" + tn + ".tsv"), dist.to_tsv(), "cli");

    TextTable dist_text({"label", "train", "%", "dev", "%", "test", "%"});
    for (const auto& f : label_distribution(corpus.train, t)) {
      std::vector<std::string> row{f.label};
      for (const Split* s : {&corpus.train, &corpus.dev, &corpus.test}) {
        std::size_t n = 0;
        for (const auto& g : label_distribution(*s, t))
          if (g.label == f.label) n = g.count;
        row.push_back(std::to_string(n));
        row.push_back(s->empty() ? "0.00" : percent(static_cast<double>(n) / static_cast<double>(s->size())));
      }
      dist_text.add_row(row);
    }
    text += "\nRelation distribution, taxonomy " + tn + "\n\n" + dist_text.render();

    // Columns of taxonomy t, rows of the other taxonomy.
    const CorrespondenceMatrix cm = correspondence(corpus.train, t, other(t));
    const std::string cm_name = "correspondence_" + tn + "_to_" + to_string(other(t));
    j["correspondence"][cm_name] = to_json(cm);
    const TextTable cm_table = correspondence_table(cm);
    text += "\nCorrespondence (columns " + tn + ", rows " + to_string(other(t)) + ", train split)\n\n" +
            cm_table.render();
    TextTable cm_tsv({"row_label", "column_label", "column_count", "fraction"});
    for (std::size_t c = 0; c < cm.column_labels.size(); ++c)
      for (std::size_t r = 0; r < cm.row_labels.size(); ++r)
        cm_tsv.add_row({cm.row_labels[r], cm.column_labels[c], std::to_string(cm.column_counts[c]),
                        full(cm.cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)))});
    write_text_file(out_dir / (cm_name + ".tsv"), cm_tsv.to_tsv(), "cli");

    TextTable ratio_tsv({"label", "side", "constituents", "specific", "ratio"});
    TextTable ratio_text({"label", "left", "right"});
    std::map<std::string, std::array<std::string, 2>> ratio_cells;
    for (Side side : {Side::Left, Side::Right}) {
      const auto ratios = relation_specific_ratio(corpus.train, t, side);
      j["relation_specific_ratio"][tn][to_string(side)] = to_json(ratios);
      for (const auto& r : ratios) {
        ratio_tsv.add_row({r.label, to_string(side), std::to_string(r.constituents), std::to_string(r.specific),
                           full(r.ratio)});
        ratio_cells[r.label][side == Side::Left ? 0 : 1] = fixed2(r.ratio);
      }
    }
    for (const auto& f : label_distribution(corpus.train, t))
      ratio_text.add_row({f.label, ratio_cells[f.label][0], ratio_cells[f.label][1]});
    write_text_file(out_dir / ("relation_ratio_" + tn + ".tsv"), ratio_tsv.to_tsv(), "cli");
    text += "\nRelation-specific constituent ratio, taxonomy " + tn + "\n\n" + ratio_text.render();

    TextTable overlap_tsv({"label_a", "label_b", "side", "overlap"});
    Json overlaps = Json::array();
    const auto labels = label_distribution(corpus.train, t);
    for (const auto& a : labels)
      for (const auto& b : labels) {
        if (a.label == b.label) continue;
        for (Side side : {Side::Left, Side::Right}) {
          const double o = lexical_overlap(corpus.train, t, a.label, b.label, side);
          overlap_tsv.add_row({a.label, b.label, to_string(side), full(o)});
          overlaps.push_back({{"label_a", a.label}, {"label_b", b.label}, {"side", to_string(side)}, {"overlap", o}});
        }
      }
    j["lexical_overlap"][tn] = overlaps;
    write_text_file(out_dir / ("lexical_overlap_" + tn + ".tsv"), overlap_tsv.to_tsv(), "cli");
  }

  TextTable unseen({"split", "compounds", "unseen_left", "unseen_right", "unseen_both", "any_pos_left",
                    "any_pos_right", "any_pos_both"});
  for (const Split* s : {&corpus.dev, &corpus.test}) {
    const UnseenPartition p = partition_unseen(*s, corpus.train);
    const UnseenPartition q = partition_unseen(*s, corpus.train, true);
    j["unseen"][s->name] = {{"positional", {{"left", p.unseen_left.size()}, {"right", p.unseen_right.size()},
                                            {"both", p.unseen_both.size()}}},
                            {"any_position", {{"left", q.unseen_left.size()}, {"right", q.unseen_right.size()},
                                              {"both", q.unseen_both.size()}}},
                            {"total", p.total}};
    unseen.add_row({s->name, std::to_string(p.total), std::to_string(p.unseen_left.size()),
                    std::to_string(p.unseen_right.size()), std::to_string(p.unseen_both.size()),
                    std::to_string(q.unseen_left.size()), std::to_string(q.unseen_right.size()),
                    std::to_string(q.unseen_both.size())});
  }
  text += "\nUnseen constituents relative to train\n\n" + unseen.render();
  write_text_file(out_dir / "unseen.tsv", unseen.to_tsv(), "cli");

  write_json_file(out_dir / "stats.json", j, "cli");
  write_text_file(out_dir / "stats.txt", text, "cli");
}

}  // namespace nci
