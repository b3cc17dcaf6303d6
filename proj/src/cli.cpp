#include "nci/cli.hpp"

#include <iostream>

#include "CLI11.hpp"
#include "nci/experiment.hpp"

namespace nci {
namespace {

struct TrainFlags {
  std::string config;
  std::string data_dir;
  std::string embeddings;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string task;
  std::string model;
  std::string direction;
  std::string main_task;
  bool include_test = false;
  std::optional<std::size_t> embedding_dim;
  std::optional<std::size_t> max_epochs;
  std::optional<std::size_t> patience;
  std::optional<std::size_t> batch_size;
  std::optional<double> aux_weight;
};

ExperimentConfig resolve_config(const TrainFlags& f) {
  Json j = Json::object();
  if (!f.config.empty()) {
    j = read_json_file(f.config, "cli");
    if (!j.is_object()) throw InputError("cli", "config must be a JSON object: " + f.config);
  }
  if (!f.data_dir.empty()) j["data_dir"] = f.data_dir;
  if (!f.embeddings.empty()) j["embeddings"] = f.embeddings;
  if (!f.out.empty()) j["out_dir"] = f.out;
  if (f.seed) j["seed"] = *f.seed;
  if (!f.model.empty()) j["model"] = f.model;
  if (f.embedding_dim) j["embedding_dim"] = *f.embedding_dim;
  if (f.max_epochs) j["train"]["max_epochs"] = *f.max_epochs;
  if (f.patience) j["train"]["patience"] = *f.patience;
  if (f.batch_size) j["train"]["batch_size"] = *f.batch_size;
  if (f.aux_weight) j["aux_weight"] = *f.aux_weight;
  if (f.include_test) j["include_test"] = true;

  const ModelKind kind = parse_model_kind(j.value("model", std::string("stl")));
  const int task_flags = !f.task.empty() + !f.direction.empty() + !f.main_task.empty();
  if (task_flags > 1) throw InputError("cli", "give only one of --task, --direction, --main-task");
  if (!f.task.empty()) {
    if (kind != ModelKind::Stl) throw InputError("cli", "--task applies to stl; use --direction or --main-task");
    j["task"] = f.task;
  }
  if (!f.direction.empty()) {
    if (!is_tl(kind)) throw InputError("cli", "--direction applies to tl-e, tl-h and tl-eh");
    j["direction"] = f.direction;
  }
  if (!f.main_task.empty()) {
    if (!is_mtl(kind)) throw InputError("cli", "--main-task applies to mtl-e and mtl-f");
    j["main_task"] = f.main_task;
  }
  ExperimentConfig cfg = ExperimentConfig::from_json(j);
  cfg.validate();
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noun-compound relation classification experiments", "nci"};
  app.require_subcommand(1);

  std::string stats_data, stats_out = "stats";
  auto* stats = app.add_subcommand("stats", "Dataset statistics and label analyses");
  stats->add_option("--data-dir", stats_data, "Directory with train.tsv, dev.tsv, test.tsv")->required();
  stats->add_option("--out", stats_out, "Output directory");

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train one model and write a results bundle");
  train->add_option("--config", tf.config, "JSON experiment config");
  train->add_option("--data-dir", tf.data_dir, "Corpus directory");
  train->add_option("--embeddings", tf.embeddings, "Word embeddings in text format");
  train->add_option("--out", tf.out, "Parent directory for bundles");
  train->add_option("--seed", tf.seed, "Random seed");
  train->add_option("--task", tf.task, "Task for stl")->check(CLI::IsMember({"A", "B"}));
  train->add_option("--model", tf.model, "stl|tl-e|tl-h|tl-eh|mtl-e|mtl-f")
      ->check(CLI::IsMember({"stl", "tl-e", "tl-h", "tl-eh", "mtl-e", "mtl-f"}));
  train->add_option("--direction", tf.direction, "Transfer direction")->check(CLI::IsMember({"A2B", "B2A"}));
  train->add_option("--main-task", tf.main_task, "Main task for multi-task models")->check(CLI::IsMember({"A", "B"}));
  train->add_flag("--include-test", tf.include_test, "Also predict and score the test split");
  train->add_option("--embedding-dim", tf.embedding_dim, "Embedding dimensionality");
  train->add_option("--max-epochs", tf.max_epochs, "Maximum training epochs");
  train->add_option("--patience", tf.patience, "Early-stopping patience");
  train->add_option("--batch-size", tf.batch_size, "Mini-batch size");
  train->add_option("--aux-weight", tf.aux_weight, "Auxiliary loss weight (multi-task)");

  ReportOptions ro;
  std::string report_task, report_data, report_out = "report";
  std::vector<std::string> bundles;
  auto* report = app.add_subcommand("report", "Compare results bundles");
  report->add_option("bundles", bundles, "Bundle directories")->required();
  report->add_option("--out", report_out, "Output directory");
  report->add_option("--task", report_task, "Require every bundle to predict this taxonomy")
      ->check(CLI::IsMember({"A", "B"}));
  report->add_option("--data-dir", report_data, "Corpus directory (default: from bundle config)");

  bool mutate = false;
  auto* selfcheck = app.add_subcommand("selfcheck", "Gradient and metric oracle checks");
  selfcheck->add_flag("--mutate", mutate, "Sign-flip the hidden bias gradient")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*stats) {
      run_stats(stats_data, stats_out);
      out << read_text_file(std::filesystem::path(stats_out) / "stats.txt", "cli");
      return 0;
    }
    if (*train) {
      const ExperimentConfig cfg = resolve_config(tf);
      const auto dir = run_train(cfg);
      out << dir.string() << '\n';
      return 0;
    }
    if (*report) {
      for (const auto& b : bundles) ro.bundles.emplace_back(b);
      ro.out_dir = report_out;
      if (!report_task.empty()) ro.task = parse_taxonomy(report_task);
      if (!report_data.empty()) ro.data_dir = report_data;
      out << run_report(ro);
      return 0;
    }
    if (*selfcheck) {
      const SelfCheckResult r = run_selfcheck(mutate);
      for (const auto& line : r.lines) out << line << '\n';
      if (!r.passed) {
        err << "selfcheck: failed: " << r.failing << '\n';
        return 1;
      }
      out << "selfcheck: all checks passed\n";
      return 0;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace nci
