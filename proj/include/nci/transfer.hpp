#pragma once

#include <optional>
#include <span>
#include <string>

#include "nci/dataset.hpp"
#include "nci/trainer.hpp"

namespace nci {

// Which trained layers seed the recipient model. None is the no-transfer
// control; output heads are never transferred.
enum class TransferLayers { None, E, H, EH };

const char* to_string(TransferLayers layers);

struct TransferMode {
  TransferLayers layers = TransferLayers::E;
  Taxonomy donor = Taxonomy::B;

  Taxonomy recipient() const { return other(donor); }
};

// Fresh recipient initialization (identical to init_stl_params with `seed`)
// with the designated layers' values copied from the donor. Copied tensors
// start with zero Adam moments and step count.
ModelParams build_tl(const ModelParams& donor, const TransferMode& mode, const LabelSpace& recipient,
                     const Matrix& pretrained_rows, std::uint64_t seed);

struct TlResult {
  std::optional<TrainResult> donor;  // absent for the control
  TrainResult recipient;
};

// Trains the donor single-task model (with its own early stopping), builds
// the recipient from it and trains the recipient.
TlResult train_tl(const Dataset& data, const TransferMode& mode, const TrainConfig& cfg,
                  const TrainHooks& recipient_hooks = {});

// E: shared embedding, task-specific hidden layers. F: embedding and hidden
// layer both shared.
enum class Sharing { E, F };

const char* to_string(Sharing sharing);

struct MtlMode {
  Sharing sharing = Sharing::E;
  Taxonomy main = Taxonomy::A;

  Taxonomy aux() const { return other(main); }
};

// Forward both heads on the same batch and accumulate the gradient of
// loss_main + aux_weight * loss_aux. Returns the combined loss.
double accumulate_mtl_gradients(ModelParams& params, std::span<const IndexPair> inputs,
                                std::span<const std::size_t> gold_main, std::span<const std::size_t> gold_aux,
                                double aux_weight);

ModelParams init_mtl_params(const Dataset& data, const MtlMode& mode, std::uint64_t seed);

// Head 0 predicts the main task, head 1 the auxiliary task. Early stopping
// monitors main-task dev accuracy only.
TrainResult train_mtl(ModelParams params, const EncodedSplit& train, const EncodedSplit& dev, const MtlMode& mode,
                      const TrainConfig& cfg, double aux_weight = 1.0, const TrainHooks& hooks = {});

TrainResult train_mtl(const Dataset& data, const MtlMode& mode, const TrainConfig& cfg, double aux_weight = 1.0,
                      const TrainHooks& hooks = {});

}  // namespace nci
