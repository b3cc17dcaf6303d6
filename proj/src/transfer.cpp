#include "nci/transfer.hpp"

namespace nci {

const char* to_string(TransferLayers layers) {
  switch (layers) {
    case TransferLayers::None: return "none";
    case TransferLayers::E: return "E";
    case TransferLayers::H: return "H";
    case TransferLayers::EH: return "EH";
  }
  return "?";
}

const char* to_string(Sharing sharing) { return sharing == Sharing::E ? "E" : "F"; }

namespace {

void copy_values(ParamTensor& dst, const ParamTensor& src) {
  if (dst.rows() != src.rows() || dst.cols() != src.cols())
    throw InputError("transfer", "shape mismatch transferring '" + src.name + "'");
  dst.values = src.values;
  dst.reset_optimizer_state();
}

}  // namespace

ModelParams build_tl(const ModelParams& donor, const TransferMode& mode, const LabelSpace& recipient,
                     const Matrix& pretrained_rows, std::uint64_t seed) {
  donor.validate();
  if (donor.vocab_size() != static_cast<std::size_t>(pretrained_rows.rows()) ||
      donor.embedding_dim() != static_cast<std::size_t>(pretrained_rows.cols()))
    throw InputError("transfer", "donor vocabulary or dimension differs from recipient");
  ModelParams p = init_stl_params(pretrained_rows, recipient.size(), seed);
  const bool embed = mode.layers == TransferLayers::E || mode.layers == TransferLayers::EH;
  const bool hidden = mode.layers == TransferLayers::H || mode.layers == TransferLayers::EH;
  if (embed) copy_values(p.embedding, donor.embedding);
  if (hidden) {
    copy_values(p.hidden[0].weight, donor.hidden_of(0).weight);
    copy_values(p.hidden[0].bias, donor.hidden_of(0).bias);
  }
  return p;
}

TlResult train_tl(const Dataset& data, const TransferMode& mode, const TrainConfig& cfg,
                  const TrainHooks& recipient_hooks) {
  const Taxonomy rec = mode.recipient();
  const LabelSpace& rec_space = data.label_space(rec);
  TlResult out{std::nullopt, {}};
  ModelParams init;
  if (mode.layers == TransferLayers::None) {
    init = init_stl_params(data.vocab.matrix, rec_space.size(), cfg.seed);
  } else {
    ModelParams donor_init = init_stl_params(data.vocab.matrix, data.label_space(mode.donor).size(), cfg.seed);
    out.donor = train_stl(std::move(donor_init), data.train, data.dev, mode.donor, cfg);
    init = build_tl(out.donor->params, mode, rec_space, data.vocab.matrix, cfg.seed);
  }
  out.recipient = train_stl(std::move(init), data.train, data.dev, rec, cfg, recipient_hooks);
  return out;
}

double accumulate_mtl_gradients(ModelParams& params, std::span<const IndexPair> inputs,
                                std::span<const std::size_t> gold_main, std::span<const std::size_t> gold_aux,
                                double aux_weight) {
  if (params.num_heads() != 2) throw InternalError("transfer", "multi-task model needs two heads");
  const ForwardTrace main_trace = forward(params, inputs, 0);
  const ForwardTrace aux_trace = forward(params, inputs, 1);
  const double combined = loss(main_trace, gold_main) + aux_weight * loss(aux_trace, gold_aux);
  backward(params, main_trace, gold_main, 0);
  // A zero weight contributes nothing; skipping keeps the main-task
  // trajectory bit-identical to single-task training.
  if (aux_weight != 0.0 && !inputs.empty()) {
    BackwardOptions opts;
    opts.item_weight = aux_weight / static_cast<double>(inputs.size());
    backward(params, aux_trace, gold_aux, 1, opts);
  }
  return combined;
}

ModelParams init_mtl_params(const Dataset& data, const MtlMode& mode, std::uint64_t seed) {
  return init_dual_params(data.vocab.matrix, data.label_space(mode.main).size(), data.label_space(mode.aux()).size(),
                          mode.sharing == Sharing::F, seed);
}

TrainResult train_mtl(ModelParams params, const EncodedSplit& train, const EncodedSplit& dev, const MtlMode& mode,
                      const TrainConfig& cfg, double aux_weight, const TrainHooks& hooks) {
  if (train.empty()) throw InputError("transfer", "empty train split");
  if (dev.empty()) throw InputError("transfer", "empty dev split");
  if (params.num_heads() != 2) throw InternalError("transfer", "multi-task model needs two heads");

  const auto& main_gold = train.gold_for(mode.main);
  const auto& aux_gold = train.gold_for(mode.aux());
  std::vector<IndexPair> inputs;
  std::vector<std::size_t> gm, ga;
  BatchStep step = [&](ModelParams& p, std::span<const std::size_t> ids) {
    inputs.clear();
    gm.clear();
    ga.clear();
    for (std::size_t id : ids) {
      if (main_gold[id] == kOutOfSpace || aux_gold[id] == kOutOfSpace)
        throw InputError("transfer", "training label outside the label space");
      inputs.push_back(train.inputs[id]);
      gm.push_back(main_gold[id]);
      ga.push_back(aux_gold[id]);
    }
    const double l = accumulate_mtl_gradients(p, inputs, gm, ga, aux_weight);
    adam_step(p, cfg.adam);
    return l;
  };
  DevScore main_dev = [&](const ModelParams& p) { return evaluate_accuracy(p, dev, mode.main, 0); };
  DevScore aux_dev = [&](const ModelParams& p) { return evaluate_accuracy(p, dev, mode.aux(), 1); };
  return run_training(std::move(params), train.size(), cfg, step, main_dev, aux_dev, hooks);
}

TrainResult train_mtl(const Dataset& data, const MtlMode& mode, const TrainConfig& cfg, double aux_weight,
                      const TrainHooks& hooks) {
  return train_mtl(init_mtl_params(data, mode, cfg.seed), data.train, data.dev, mode, cfg, aux_weight, hooks);
}

}  // namespace nci
