#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nci/report.hpp"
#include "nci/trainer.hpp"

namespace nci {

enum class ModelKind { Stl, TlE, TlH, TlEH, MtlE, MtlF };

const char* to_string(ModelKind kind);   // "stl", "tl-e", ...
const char* display_name(ModelKind kind);  // "STL", "TL_E", ...
ModelKind parse_model_kind(const std::string& s);
bool is_tl(ModelKind kind);
bool is_mtl(ModelKind kind);

struct ExperimentConfig {
  std::string embeddings;
  std::string data_dir;
  std::string out_dir = "runs";
  std::size_t embedding_dim = 300;
  ModelKind model = ModelKind::Stl;
  // Single-task: the trained task. Transfer: the recipient. Multi-task: the
  // main task.
  Taxonomy task = Taxonomy::A;
  TrainConfig train;
  bool include_test = false;
  // Diagnostic; only meaningful for multi-task models.
  double aux_weight = 1.0;

  // "A2B" for a transfer from A into B.
  std::string direction() const;

  // Sorted keys, without out_dir. Fields irrelevant to the model kind are
  // omitted so equivalent configurations hash equally.
  Json canonical() const;
  std::string hash() const;  // hex SHA-256 of canonical().dump()
  std::string bundle_name() const { return hash().substr(0, 16); }

  static ExperimentConfig from_json(const Json& j);
  void validate() const;
};

std::string sha256_hex(const std::string& data);

// Trains per config and writes the results bundle; returns its directory.
std::filesystem::path run_train(const ExperimentConfig& cfg);

// Dataset statistics, label distributions, correspondence matrices,
// relation-specific ratios and lexical overlaps.
void run_stats(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir);

struct ReportOptions {
  std::vector<std::filesystem::path> bundles;
  std::filesystem::path out_dir;
  std::optional<Taxonomy> task;
  std::optional<std::filesystem::path> data_dir;
};

// Cross-model comparison tables. Returns the text report.
std::string run_report(const ReportOptions& opts);

struct SelfCheckResult {
  bool passed = true;
  std::vector<std::string> lines;
  std::string failing;
};

SelfCheckResult run_selfcheck(bool mutate_backward);

}  // namespace nci
