#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nci/dataset.hpp"
#include "nci/nncore.hpp"

namespace nci {

struct TrainConfig {
  std::size_t batch_size = 5;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  AdamConfig adam;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class StopReason { EarlyStop, MaxEpochs };

const char* to_string(StopReason r);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
  std::optional<double> aux_dev_accuracy;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  std::size_t stopped_epoch = 0;
  StopReason stop_reason = StopReason::MaxEpochs;
};

// Patience counter over a monitored accuracy. Only a strict improvement over
// the best value so far resets the counter.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true if `accuracy` is a new best.
  bool observe(std::size_t epoch, double accuracy);
  bool should_stop() const { return since_best_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best() const { return best_; }

 private:
  std::size_t patience_;
  double best_ = -1.0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
};

// Test instrumentation. Overrides replace measured dev accuracies.
struct TrainHooks {
  std::function<void(const ModelParams&)> on_start;
  std::function<void(const ModelParams&, std::size_t epoch)> on_epoch_end;
  std::function<double(std::size_t epoch, double measured)> dev_accuracy_override;
  std::function<double(std::size_t epoch, double measured)> aux_accuracy_override;
};

struct TrainResult {
  ModelParams params;  // best-dev snapshot
  TrainLog log;
};

// Permutation of [0, n) for one epoch, drawn from the epoch's own stream.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

// Runs one mini-batch update and returns its mean loss.
using BatchStep = std::function<double(ModelParams&, std::span<const std::size_t> record_ids)>;
using DevScore = std::function<double(const ModelParams&)>;

// Epoch loop shared by single-task and multi-task training. Stopping depends
// on `main_dev` only; `aux_dev`, when set, is just logged.
TrainResult run_training(ModelParams params, std::size_t num_train, const TrainConfig& cfg, const BatchStep& step,
                         const DevScore& main_dev, const DevScore& aux_dev, const TrainHooks& hooks);

TrainResult train_stl(ModelParams params, const EncodedSplit& train, const EncodedSplit& dev, Taxonomy taxonomy,
                      const TrainConfig& cfg, const TrainHooks& hooks = {});

struct Prediction {
  std::size_t label = 0;
  RowVector probs;
};

// Argmax per record; the lowest index wins ties.
std::vector<Prediction> predict(const ModelParams& params, const EncodedSplit& split, std::size_t head = 0);

double accuracy(std::span<const Prediction> predictions, std::span<const std::size_t> gold);

// Out-of-space gold labels count as errors.
double evaluate_accuracy(const ModelParams& params, const EncodedSplit& split, Taxonomy taxonomy,
                         std::size_t head = 0);

}  // namespace nci
