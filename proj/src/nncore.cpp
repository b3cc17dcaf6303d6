#include "nci/nncore.hpp"

#include <algorithm>
#include <cmath>

namespace nci {

Taxonomy parse_taxonomy(const std::string& s) {
  if (s == "A" || s == "a") return Taxonomy::A;
  if (s == "B" || s == "b") return Taxonomy::B;
  throw InputError("corpus", "unknown taxonomy '" + s + "' (expected A or B)");
}

void AdamConfig::validate() const {
  if (!(eta > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
    throw InputError("nncore", "invalid Adam configuration");
}

ParamTensor::ParamTensor(std::string tensor_name, Eigen::Index rows, Eigen::Index cols)
    : name(std::move(tensor_name)),
      values(Matrix::Zero(rows, cols)),
      grad(Matrix::Zero(rows, cols)),
      m(Matrix::Zero(rows, cols)),
      v(Matrix::Zero(rows, cols)) {}

void ParamTensor::reset_optimizer_state() {
  grad.setZero(values.rows(), values.cols());
  m.setZero(values.rows(), values.cols());
  v.setZero(values.rows(), values.cols());
  step_count = 0;
}

void ModelParams::zero_grad() {
  for_each_tensor([](ParamTensor& t) { t.zero_grad(); });
}

void ModelParams::validate() const {
  const Eigen::Index d = embedding.cols();
  auto same_shape = [](const ParamTensor& t) {
    return t.grad.rows() == t.rows() && t.grad.cols() == t.cols() && t.m.rows() == t.rows() &&
           t.m.cols() == t.cols() && t.v.rows() == t.rows() && t.v.cols() == t.cols();
  };
  bool ok = d > 0 && embedding.rows() > 0 && !hidden.empty() && !heads.empty() &&
            hidden_for_head.size() == heads.size();
  for_each_tensor([&](const ParamTensor& t) { ok = ok && same_shape(t); });
  for (const auto& h : hidden) {
    ok = ok && h.weight.rows() == 2 * d && h.weight.cols() == d && h.bias.rows() == 1 && h.bias.cols() == d;
  }
  for (std::size_t i = 0; ok && i < heads.size(); ++i) {
    ok = hidden_for_head[i] < hidden.size() && heads[i].weight.rows() == d && heads[i].bias.rows() == 1 &&
         heads[i].bias.cols() == heads[i].weight.cols() && heads[i].weight.cols() >= 1;
  }
  if (!ok) throw InternalError("nncore", "inconsistent model parameter shapes");
}

namespace {

DenseLayer make_dense(const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng) {
  DenseLayer layer{ParamTensor(name + ".weight", in, out), ParamTensor(name + ".bias", 1, out)};
  glorot_uniform(layer.weight.values, rng);
  return layer;
}

ParamTensor make_embedding(const Matrix& rows) {
  if (rows.rows() == 0 || rows.cols() == 0) throw InputError("nncore", "empty embedding matrix");
  ParamTensor t("embedding", rows.rows(), rows.cols());
  t.values = rows;
  return t;
}

}  // namespace

ModelParams init_stl_params(const Matrix& embedding_rows, std::size_t num_classes, std::uint64_t seed) {
  if (num_classes == 0) throw InputError("nncore", "label space is empty");
  Rng rng(derive_seed(seed, "init"));
  const Eigen::Index d = embedding_rows.cols();
  ModelParams p;
  p.embedding = make_embedding(embedding_rows);
  p.hidden.push_back(make_dense("hidden", 2 * d, d, rng));
  p.heads.push_back(make_dense("output", d, static_cast<Eigen::Index>(num_classes), rng));
  p.hidden_for_head = {0};
  return p;
}

// Initialization order matches init_stl_params for the main task, so the
// shared and main-head tensors of a fully shared model start identical to
// the single-task model with the same seed.
ModelParams init_dual_params(const Matrix& embedding_rows, std::size_t main_classes, std::size_t aux_classes,
                             bool share_hidden, std::uint64_t seed) {
  if (main_classes == 0 || aux_classes == 0) throw InputError("nncore", "label space is empty");
  Rng rng(derive_seed(seed, "init"));
  const Eigen::Index d = embedding_rows.cols();
  ModelParams p;
  p.embedding = make_embedding(embedding_rows);
  p.hidden.push_back(make_dense(share_hidden ? "hidden" : "hidden.main", 2 * d, d, rng));
  p.heads.push_back(make_dense("output.main", d, static_cast<Eigen::Index>(main_classes), rng));
  if (!share_hidden) p.hidden.push_back(make_dense("hidden.aux", 2 * d, d, rng));
  p.heads.push_back(make_dense("output.aux", d, static_cast<Eigen::Index>(aux_classes), rng));
  p.hidden_for_head = {0, share_hidden ? std::size_t{0} : std::size_t{1}};
  return p;
}

ForwardTrace forward(const ModelParams& params, std::span<const IndexPair> batch, std::size_t head) {
  if (head >= params.num_heads()) throw InternalError("nncore", "forward: no output head " + std::to_string(head));
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index d = params.embedding.cols();
  const auto vocab = params.vocab_size();

  ForwardTrace t;
  t.head = head;
  t.input_indices.assign(batch.begin(), batch.end());
  t.concat_embed.resize(n, 2 * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [left, right] = batch[static_cast<std::size_t>(i)];
    if (left >= vocab || right >= vocab)
      throw InputError("nncore", "forward: vocabulary index out of range");
    t.concat_embed.row(i).head(d) = params.embedding.values.row(static_cast<Eigen::Index>(left));
    t.concat_embed.row(i).tail(d) = params.embedding.values.row(static_cast<Eigen::Index>(right));
  }

  const DenseLayer& hid = params.hidden_of(head);
  t.hidden_pre = t.concat_embed * hid.weight.values;
  t.hidden_pre.rowwise() += hid.bias.values.row(0);
  t.hidden_act = sigmoid(t.hidden_pre.array()).matrix();

  const DenseLayer& out = params.heads[head];
  t.logits = t.hidden_act * out.weight.values;
  t.logits.rowwise() += out.bias.values.row(0);
  t.probs = softmax_rows(t.logits);
  return t;
}

double loss(const ForwardTrace& trace, std::span<const std::size_t> gold) {
  return cross_entropy(trace.probs, gold);
}

void backward(ModelParams& params, const ForwardTrace& trace, std::span<const std::size_t> gold, std::size_t head,
              const BackwardOptions& options) {
  const auto n = static_cast<Eigen::Index>(trace.batch_size());
  const Eigen::Index d = params.embedding.cols();
  if (head >= params.num_heads() || trace.head != head || gold.size() != trace.batch_size() ||
      trace.concat_embed.cols() != 2 * d || trace.probs.rows() != n ||
      trace.probs.cols() != params.heads[head].weight.cols())
    throw InternalError("nncore", "backward: trace does not match parameters");
  if (n == 0) return;

  const double w = options.item_weight.value_or(1.0 / static_cast<double>(n));
  Matrix dlogits = trace.probs;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = static_cast<Eigen::Index>(gold[static_cast<std::size_t>(i)]);
    if (g >= dlogits.cols()) throw InternalError("nncore", "backward: gold index out of range");
    dlogits(i, g) -= 1.0;
  }
  dlogits *= w;

  DenseLayer& out = params.heads[head];
  out.weight.grad.noalias() += trace.hidden_act.transpose() * dlogits;
  out.bias.grad += dlogits.colwise().sum();

  const Matrix dact = dlogits * out.weight.values.transpose();
  const Matrix dpre =
      (dact.array() * trace.hidden_act.array() * (1.0 - trace.hidden_act.array())).matrix();

  DenseLayer& hid = params.hidden_of(head);
  hid.weight.grad.noalias() += trace.concat_embed.transpose() * dpre;
  if (options.flip_hidden_bias_sign)
    hid.bias.grad -= dpre.colwise().sum();
  else
    hid.bias.grad += dpre.colwise().sum();

  const Matrix dconcat = dpre * hid.weight.values.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [left, right] = trace.input_indices[static_cast<std::size_t>(i)];
    params.embedding.grad.row(static_cast<Eigen::Index>(left)) += dconcat.row(i).head(d);
    params.embedding.grad.row(static_cast<Eigen::Index>(right)) += dconcat.row(i).tail(d);
  }
}

void adam_step(ModelParams& params, const AdamConfig& cfg) {
  params.for_each_tensor([](const ParamTensor& t) {
    if (!t.grad.allFinite()) throw NumericError("nncore", "non-finite gradient in tensor '" + t.name + "'");
  });
  params.for_each_tensor([&](ParamTensor& t) {
    ++t.step_count;
    auto m = t.m.array();
    auto v = t.v.array();
    auto x = t.values.array();
    adam_update(t.grad.array(), m, v, x, t.step_count, cfg);
    t.zero_grad();
  });
}

GradCheckReport gradient_check(const ModelParams& params, std::span<const IndexPair> batch,
                               std::span<const std::size_t> gold, std::size_t head, double tolerance,
                               double step, const BackwardOptions& options) {
  ModelParams work = params;
  work.zero_grad();
  backward(work, forward(work, batch, head), gold, head, options);

  GradCheckReport report;
  report.tolerance = tolerance;
  auto probe = [&](ParamTensor& t) {
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        const double saved = t.values(r, c);
        t.values(r, c) = saved + step;
        const double up = loss(forward(work, batch, head), gold);
        t.values(r, c) = saved - step;
        const double down = loss(forward(work, batch, head), gold);
        t.values(r, c) = saved;

        const double numeric = (up - down) / (2.0 * step);
        const double analytic = t.grad(r, c);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        const double rel = std::abs(analytic - numeric) / denom;
        ++report.coordinates_checked;
        if (rel > report.max_relative_error) {
          report.max_relative_error = rel;
          report.worst_tensor = t.name;
        }
      }
    }
  };
  work.for_each_tensor(probe);
  return report;
}

GradCheckCase make_gradcheck_case(const GradCheckSpec& spec) {
  Rng rng(derive_seed(spec.seed, "gradcheck"));
  const auto d = static_cast<Eigen::Index>(spec.dim);
  Matrix emb(static_cast<Eigen::Index>(spec.vocab), d);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb.data()[i] = rng.uniform(-1.0, 1.0);

  GradCheckCase c{init_stl_params(emb, spec.num_classes, spec.seed), {}, {}};
  for (auto& layer : c.params.hidden)
    for (Eigen::Index i = 0; i < layer.bias.values.size(); ++i) layer.bias.values.data()[i] = rng.uniform(-0.5, 0.5);
  for (auto& layer : c.params.heads)
    for (Eigen::Index i = 0; i < layer.bias.values.size(); ++i) layer.bias.values.data()[i] = rng.uniform(-0.5, 0.5);

  for (std::size_t i = 0; i < spec.batch; ++i) {
    c.batch.push_back({static_cast<std::size_t>(rng.below(spec.vocab)), static_cast<std::size_t>(rng.below(spec.vocab))});
    c.gold.push_back(static_cast<std::size_t>(rng.below(spec.num_classes)));
  }
  return c;
}

GradCheckReport gradient_check(const GradCheckSpec& spec, double tolerance, const BackwardOptions& options) {
  const GradCheckCase c = make_gradcheck_case(spec);
  return gradient_check(c.params, c.batch, c.gold, 0, tolerance, 1e-3, options);
}

}  // namespace nci
