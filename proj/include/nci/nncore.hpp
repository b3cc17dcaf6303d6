#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nci/math.hpp"
#include "nci/types.hpp"

namespace nci {

// A trainable tensor with its gradient buffer and Adam moments.
struct ParamTensor {
  std::string name;
  Matrix values;
  Matrix grad;
  Matrix m;
  Matrix v;
  std::uint64_t step_count = 0;

  ParamTensor() = default;
  ParamTensor(std::string tensor_name, Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  void zero_grad() { grad.setZero(); }
  void reset_optimizer_state();
};

// y = x * weight + bias; weight is (in x out), bias is (1 x out).
struct DenseLayer {
  ParamTensor weight;
  ParamTensor bias;
};

// Embedding lookup -> concat -> dense+sigmoid -> dense+softmax, with one or
// two output heads. Each head reads from hidden[hidden_for_head[head]], so a
// fully shared model has one hidden layer referenced by both heads.
struct ModelParams {
  ParamTensor embedding;
  std::vector<DenseLayer> hidden;
  std::vector<DenseLayer> heads;
  std::vector<std::size_t> hidden_for_head;

  std::size_t embedding_dim() const { return static_cast<std::size_t>(embedding.cols()); }
  std::size_t vocab_size() const { return static_cast<std::size_t>(embedding.rows()); }
  std::size_t num_heads() const { return heads.size(); }
  std::size_t num_classes(std::size_t head) const { return static_cast<std::size_t>(heads.at(head).weight.cols()); }
  const DenseLayer& hidden_of(std::size_t head) const { return hidden.at(hidden_for_head.at(head)); }
  DenseLayer& hidden_of(std::size_t head) { return hidden.at(hidden_for_head.at(head)); }

  // Visits every distinct tensor once, in a fixed order.
  template <typename F>
  void for_each_tensor(F&& f) {
    f(embedding);
    for (auto& layer : hidden) {
      f(layer.weight);
      f(layer.bias);
    }
    for (auto& layer : heads) {
      f(layer.weight);
      f(layer.bias);
    }
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    const_cast<ModelParams*>(this)->for_each_tensor([&](const ParamTensor& t) { f(t); });
  }

  void zero_grad();
  // Throws InternalError if shapes are inconsistent.
  void validate() const;
};

// A model with two output heads. Head 0 is the main task.
using DualModelParams = ModelParams;

ModelParams init_stl_params(const Matrix& embedding_rows, std::size_t num_classes, std::uint64_t seed);
ModelParams init_dual_params(const Matrix& embedding_rows, std::size_t main_classes, std::size_t aux_classes,
                             bool share_hidden, std::uint64_t seed);

struct ForwardTrace {
  std::size_t head = 0;
  std::vector<IndexPair> input_indices;
  Matrix concat_embed;
  Matrix hidden_pre;
  Matrix hidden_act;
  Matrix logits;
  Matrix probs;

  std::size_t batch_size() const { return input_indices.size(); }
};

ForwardTrace forward(const ModelParams& params, std::span<const IndexPair> batch, std::size_t head);

double loss(const ForwardTrace& trace, std::span<const std::size_t> gold);

struct BackwardOptions {
  // Multiplier on each item's loss gradient. Defaults to 1/batch, which makes
  // the accumulated gradient that of the mean loss returned by loss().
  std::optional<double> item_weight;
  // Fault injection for the gradient-check mutation test.
  bool flip_hidden_bias_sign = false;
};

void backward(ModelParams& params, const ForwardTrace& trace, std::span<const std::size_t> gold, std::size_t head,
              const BackwardOptions& options = {});

void adam_step(ModelParams& params, const AdamConfig& cfg);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t coordinates_checked = 0;
  double tolerance = 0.0;
  bool passed() const { return max_relative_error < tolerance; }
};

// Central finite differences of the mean loss against backward().
GradCheckReport gradient_check(const ModelParams& params, std::span<const IndexPair> batch,
                               std::span<const std::size_t> gold, std::size_t head, double tolerance,
                               double step = 1e-3, const BackwardOptions& options = {});

struct GradCheckSpec {
  std::uint64_t seed = 7;
  std::size_t dim = 4;
  std::size_t num_classes = 3;
  std::size_t batch = 5;
  std::size_t vocab = 6;
};

struct GradCheckCase {
  ModelParams params;
  std::vector<IndexPair> batch;
  std::vector<std::size_t> gold;
};

// Seeded random model with non-zero biases and a random batch.
GradCheckCase make_gradcheck_case(const GradCheckSpec& spec);

GradCheckReport gradient_check(const GradCheckSpec& spec, double tolerance, const BackwardOptions& options = {});

}  // namespace nci
