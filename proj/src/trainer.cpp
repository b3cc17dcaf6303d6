#include "nci/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "nci/random.hpp"

namespace nci {

void TrainConfig::validate() const {
  if (batch_size == 0 || max_epochs == 0 || patience == 0)
    throw InputError("trainer", "batch_size, max_epochs and patience must be positive");
  if (patience > max_epochs) throw InputError("trainer", "patience exceeds max_epochs");
  adam.validate();
}

const char* to_string(StopReason r) { return r == StopReason::EarlyStop ? "early-stop" : "max-epochs"; }

bool EarlyStopping::observe(std::size_t epoch, double accuracy) {
  if (accuracy > best_) {
    best_ = accuracy;
    best_epoch_ = epoch;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "shuffle", epoch));
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

TrainResult run_training(ModelParams params, std::size_t num_train, const TrainConfig& cfg, const BatchStep& step,
                         const DevScore& main_dev, const DevScore& aux_dev, const TrainHooks& hooks) {
  cfg.validate();
  if (num_train == 0) throw InputError("trainer", "empty train split");
  params.validate();
  params.zero_grad();
  if (hooks.on_start) hooks.on_start(params);

  EarlyStopping stopper(cfg.patience);
  TrainResult result{params, {}};
  TrainLog& log = result.log;
  log.stop_reason = StopReason::MaxEpochs;
  log.stopped_epoch = cfg.max_epochs;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto order = epoch_order(num_train, cfg.seed, epoch);
    double total = 0.0;
    for (std::size_t start = 0; start < num_train; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, num_train - start);
      total += step(params, std::span<const std::size_t>(order).subspan(start, len)) * static_cast<double>(len);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total / static_cast<double>(num_train);
    rec.dev_accuracy = main_dev(params);
    if (hooks.dev_accuracy_override) rec.dev_accuracy = hooks.dev_accuracy_override(epoch, rec.dev_accuracy);
    if (aux_dev) {
      double aux = aux_dev(params);
      if (hooks.aux_accuracy_override) aux = hooks.aux_accuracy_override(epoch, aux);
      rec.aux_dev_accuracy = aux;
    }
    log.epochs.push_back(rec);

    if (stopper.observe(epoch, rec.dev_accuracy)) result.params = params;
    if (hooks.on_epoch_end) hooks.on_epoch_end(params, epoch);
    if (stopper.should_stop()) {
      log.stop_reason = StopReason::EarlyStop;
      log.stopped_epoch = epoch;
      break;
    }
  }
  log.best_epoch = stopper.best_epoch();
  return result;
}

namespace {

void gather(const EncodedSplit& split, Taxonomy taxonomy, std::span<const std::size_t> ids,
            std::vector<IndexPair>& inputs, std::vector<std::size_t>& gold) {
  inputs.clear();
  gold.clear();
  const auto& labels = split.gold_for(taxonomy);
  for (std::size_t id : ids) {
    inputs.push_back(split.inputs[id]);
    if (labels[id] == kOutOfSpace) throw InputError("trainer", "training label outside the label space");
    gold.push_back(labels[id]);
  }
}

}  // namespace

TrainResult train_stl(ModelParams params, const EncodedSplit& train, const EncodedSplit& dev, Taxonomy taxonomy,
                      const TrainConfig& cfg, const TrainHooks& hooks) {
  if (train.empty()) throw InputError("trainer", "empty train split");
  if (dev.empty()) throw InputError("trainer", "empty dev split");

  std::vector<IndexPair> inputs;
  std::vector<std::size_t> gold;
  BatchStep step = [&](ModelParams& p, std::span<const std::size_t> ids) {
    gather(train, taxonomy, ids, inputs, gold);
    const ForwardTrace trace = forward(p, inputs, 0);
    const double l = loss(trace, gold);
    backward(p, trace, gold, 0);
    adam_step(p, cfg.adam);
    return l;
  };
  DevScore dev_score = [&](const ModelParams& p) { return evaluate_accuracy(p, dev, taxonomy, 0); };
  return run_training(std::move(params), train.size(), cfg, step, dev_score, nullptr, hooks);
}

std::vector<Prediction> predict(const ModelParams& params, const EncodedSplit& split, std::size_t head) {
  constexpr std::size_t kChunk = 512;
  std::vector<Prediction> out;
  out.reserve(split.size());
  for (std::size_t start = 0; start < split.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, split.size() - start);
    const ForwardTrace t = forward(params, std::span<const IndexPair>(split.inputs).subspan(start, len), head);
    for (Eigen::Index i = 0; i < t.probs.rows(); ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index c = 1; c < t.probs.cols(); ++c)
        if (t.probs(i, c) > t.probs(i, best)) best = c;
      out.push_back({static_cast<std::size_t>(best), t.probs.row(i)});
    }
  }
  return out;
}

double accuracy(std::span<const Prediction> predictions, std::span<const std::size_t> gold) {
  if (predictions.size() != gold.size()) throw InternalError("trainer", "prediction/gold length mismatch");
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i] != kOutOfSpace && predictions[i].label == gold[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double evaluate_accuracy(const ModelParams& params, const EncodedSplit& split, Taxonomy taxonomy,
                         std::size_t head) {
  return accuracy(predict(params, split, head), split.gold_for(taxonomy));
}

}  // namespace nci
