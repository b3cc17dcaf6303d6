#include "nci/experiment.hpp"

#include <openssl/evp.h>

#include "nci/analysis.hpp"
#include "nci/checkpoint.hpp"
#include "nci/dataset.hpp"
#include "nci/transfer.hpp"

namespace nci {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Stl: return "stl";
    case ModelKind::TlE: return "tl-e";
    case ModelKind::TlH: return "tl-h";
    case ModelKind::TlEH: return "tl-eh";
    case ModelKind::MtlE: return "mtl-e";
    case ModelKind::MtlF: return "mtl-f";
  }
  return "?";
}

const char* display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Stl: return "STL";
    case ModelKind::TlE: return "TL_E";
    case ModelKind::TlH: return "TL_H";
    case ModelKind::TlEH: return "TL_EH";
    case ModelKind::MtlE: return "MTL_E";
    case ModelKind::MtlF: return "MTL_F";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  for (auto k : {ModelKind::Stl, ModelKind::TlE, ModelKind::TlH, ModelKind::TlEH, ModelKind::MtlE, ModelKind::MtlF})
    if (s == to_string(k)) return k;
  throw InputError("cli", "unknown model '" + s + "' (expected stl|tl-e|tl-h|tl-eh|mtl-e|mtl-f)");
}

bool is_tl(ModelKind kind) { return kind == ModelKind::TlE || kind == ModelKind::TlH || kind == ModelKind::TlEH; }
bool is_mtl(ModelKind kind) { return kind == ModelKind::MtlE || kind == ModelKind::MtlF; }

std::string ExperimentConfig::direction() const {
  return std::string(to_string(other(task))) + "2" + to_string(task);
}

Json ExperimentConfig::canonical() const {
  Json j;
  j["embeddings"] = embeddings;
  j["data_dir"] = data_dir;
  j["embedding_dim"] = embedding_dim;
  j["model"] = to_string(model);
  if (is_tl(model))
    j["direction"] = direction();
  else if (is_mtl(model))
    j["main_task"] = to_string(task);
  else
    j["task"] = to_string(task);
  j["seed"] = train.seed;
  j["train"] = {{"batch_size", train.batch_size}, {"max_epochs", train.max_epochs}, {"patience", train.patience},
                {"eta", train.adam.eta}, {"beta1", train.adam.beta1}, {"beta2", train.adam.beta2},
                {"epsilon", train.adam.epsilon}};
  j["include_test"] = include_test;
  if (is_mtl(model)) j["aux_weight"] = aux_weight;
  return j;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("cli", "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string ExperimentConfig::hash() const { return sha256_hex(canonical().dump()); }

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("embeddings")) c.embeddings = j.at("embeddings").get<std::string>();
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("embedding_dim")) c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    if (j.contains("model")) c.model = parse_model_kind(j.at("model").get<std::string>());
    if (j.contains("task")) c.task = parse_taxonomy(j.at("task").get<std::string>());
    if (j.contains("main_task")) c.task = parse_taxonomy(j.at("main_task").get<std::string>());
    if (j.contains("direction")) {
      const auto d = j.at("direction").get<std::string>();
      if (d != "A2B" && d != "B2A") throw InputError("cli", "direction must be A2B or B2A");
      c.task = d == "A2B" ? Taxonomy::B : Taxonomy::A;
    }
    if (j.contains("seed")) c.train.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("train")) {
      const Json& t = j.at("train");
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.max_epochs = t.value("max_epochs", c.train.max_epochs);
      c.train.patience = t.value("patience", c.train.patience);
      c.train.adam.eta = t.value("eta", c.train.adam.eta);
      c.train.adam.beta1 = t.value("beta1", c.train.adam.beta1);
      c.train.adam.beta2 = t.value("beta2", c.train.adam.beta2);
      c.train.adam.epsilon = t.value("epsilon", c.train.adam.epsilon);
    }
    if (j.contains("include_test")) c.include_test = j.at("include_test").get<bool>();
    if (j.contains("aux_weight")) c.aux_weight = j.at("aux_weight").get<double>();
  } catch (const Json::exception& e) {
    throw InputError("cli", std::string("malformed config: ") + e.what());
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (embeddings.empty()) throw InputError("cli", "no embeddings file given");
  if (data_dir.empty()) throw InputError("cli", "no data directory given");
  if (embedding_dim == 0) throw InputError("cli", "embedding_dim must be positive");
  if (!(aux_weight >= 0.0)) throw InputError("cli", "aux_weight must be non-negative");
  train.validate();
}

namespace {

PredictionFile make_predictions(const ModelParams& params, const Dataset& data, const std::string& split_name,
                                Taxonomy taxonomy, std::size_t head) {
  const Split& split = data.split(split_name);
  const auto preds = predict(params, data.encoded(split_name), head);
  const LabelSpace& space = data.label_space(taxonomy);
  PredictionFile file;
  file.taxonomy = taxonomy;
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& r = split.records[i];
    const auto label = static_cast<Eigen::Index>(preds[i].label);
    file.rows.push_back({r.left, r.right, r.label(taxonomy), space.label(preds[i].label), preds[i].probs(label)});
  }
  return file;
}

struct HeadOutput {
  Taxonomy taxonomy;
  std::size_t head;
  std::string role;
};

}  // namespace

std::filesystem::path run_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const Corpus corpus = load_corpus(cfg.data_dir);
  const EmbeddingTable table = load_embeddings(cfg.embeddings, cfg.embedding_dim, cfg.train.seed);
  const Dataset data = make_dataset(corpus, table, cfg.train.seed);

  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / cfg.bundle_name();
  std::filesystem::create_directories(dir);

  Json manifest;
  manifest["format_version"] = 1;
  manifest["model"] = to_string(cfg.model);
  manifest["display_name"] = display_name(cfg.model);
  manifest["config_hash"] = cfg.hash();
  manifest["seed"] = cfg.train.seed;

  ModelParams final_params;
  TrainLog log;
  std::vector<HeadOutput> heads;

  if (cfg.model == ModelKind::Stl) {
    manifest["task"] = to_string(cfg.task);
    ModelParams init = init_stl_params(data.vocab.matrix, data.label_space(cfg.task).size(), cfg.train.seed);
    TrainResult r = train_stl(std::move(init), data.train, data.dev, cfg.task, cfg.train);
    final_params = std::move(r.params);
    log = r.log;
    heads.push_back({cfg.task, 0, "primary"});
  } else if (is_tl(cfg.model)) {
    TransferMode mode;
    mode.layers = cfg.model == ModelKind::TlE ? TransferLayers::E
                  : cfg.model == ModelKind::TlH ? TransferLayers::H
                                                : TransferLayers::EH;
    mode.donor = other(cfg.task);
    manifest["direction"] = cfg.direction();
    manifest["transfer_layers"] = to_string(mode.layers);
    TlResult r = train_tl(data, mode, cfg.train);
    save_checkpoint(r.donor->params, dir / "donor_checkpoint.bin");
    write_json_file(dir / "donor_train_log.json", to_json(r.donor->log), "cli");
    final_params = std::move(r.recipient.params);
    log = r.recipient.log;
    heads.push_back({cfg.task, 0, "primary"});
  } else {
    MtlMode mode{cfg.model == ModelKind::MtlE ? Sharing::E : Sharing::F, cfg.task};
    manifest["main_task"] = to_string(cfg.task);
    manifest["sharing"] = to_string(mode.sharing);
    manifest["aux_weight"] = cfg.aux_weight;
    TrainResult r = train_mtl(data, mode, cfg.train, cfg.aux_weight);
    final_params = std::move(r.params);
    log = r.log;
    heads.push_back({mode.main, 0, "primary"});
    heads.push_back({mode.aux(), 1, "auxiliary"});
  }

  save_checkpoint(final_params, dir / "checkpoint.bin");
  write_json_file(dir / "train_log.json", to_json(log), "cli");
  write_json_file(dir / "load_report.json", to_json(table.report, &data.vocab), "cli");

  std::vector<std::string> splits{"dev"};
  if (cfg.include_test) splits.push_back("test");

  Json tasks = Json::array();
  Json scores = Json::object();
  for (const auto& h : heads) {
    Json task = {{"taxonomy", to_string(h.taxonomy)}, {"head", h.head}, {"role", h.role}};
    Json& task_scores = scores[to_string(h.taxonomy)];
    for (const auto& s : splits) {
      const PredictionFile pf = make_predictions(final_params, data, s, h.taxonomy, h.head);
      const std::string name = "predictions_" + s + "_" + to_string(h.taxonomy) + ".tsv";
      write_predictions(pf, dir / name);
      task["predictions"][s] = name;
      const ScoreResult sr = score(pf);
      task_scores[s] = {{"scores", to_json(sr.scores)}, {"confusion", to_json(sr.confusion)}};
      if (s == "test") {
        const UnseenPartition part = partition_unseen(data.corpus.test, data.corpus.train);
        task_scores[s]["generalization_error"] = to_json(generalization_error(pf, part));
      }
    }
    tasks.push_back(task);
  }
  manifest["tasks"] = tasks;
  write_json_file(dir / "scores.json", scores, "cli");
  write_json_file(dir / "manifest.json", manifest, "cli");

  Json resolved = cfg.canonical();
  resolved["config_hash"] = cfg.hash();
  write_json_file(dir / "config.json", resolved, "cli");
  return dir;
}

}  // namespace nci
