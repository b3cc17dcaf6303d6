#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "nci/checkpoint.hpp"
#include "nci/experiment.hpp"
#include "nci/metrics.hpp"
#include "nci/nncore.hpp"
#include "nci/random.hpp"

namespace nci {
namespace {

constexpr double kGradTolerance = 1e-4;
constexpr std::size_t kGradModels = 20;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Check {
  std::string name;
  std::function<std::pair<bool, std::string>()> run;
};

std::pair<bool, std::string> check_gradients(bool mutate) {
  BackwardOptions opts;
  opts.flip_hidden_bias_sign = mutate;
  double worst = 0.0;
  std::string where;
  for (std::size_t i = 0; i <= kGradModels; ++i) {
    GradCheckSpec spec;  // i == 0 is the default seed-7 model
    if (i > 0) {
      Rng shape(derive_seed(i, "selfcheck-shape"));
      spec.seed = derive_seed(i, "selfcheck-model");
      spec.dim = 2 + shape.below(7);
      spec.num_classes = 2 + shape.below(5);
      spec.batch = 1 + shape.below(7);
    }
    const GradCheckReport r = gradient_check(spec, kGradTolerance, opts);
    if (r.max_relative_error > worst) {
      worst = r.max_relative_error;
      where = r.worst_tensor + " (model " + std::to_string(i) + ")";
    }
  }
  return {worst < kGradTolerance, std::to_string(kGradModels + 1) + " models, max relative error " +
                                      fmt("%.3g", worst) + " at " + where};
}

std::pair<bool, std::string> check_softmax() {
  Rng rng(derive_seed(0, "selfcheck-softmax"));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(5));
    const auto k = static_cast<Eigen::Index>(2 + rng.below(30));
    Matrix z(n, k);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.uniform(-50.0, 50.0);
    const Matrix p = softmax_rows(z);
    const Matrix q = softmax_rows((z.array() + rng.uniform(-100.0, 100.0)).matrix());
    if (!p.allFinite() || (p.array() < 0.0).any()) return {false, "non-finite or negative probability"};
    worst = std::max(worst, (p.rowwise().sum().array() - 1.0).abs().maxCoeff());
    worst = std::max(worst, (p - q).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-12, "200 matrices, max deviation " + fmt("%.3g", worst)};
}

std::pair<bool, std::string> check_adam() {
  Rng rng(derive_seed(0, "selfcheck-adam"));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    AdamConfig cfg;
    cfg.eta = rng.uniform(1e-4, 1e-1);
    cfg.beta1 = rng.uniform(0.5, 0.99);
    cfg.beta2 = rng.uniform(0.9, 0.9999);
    cfg.epsilon = std::pow(10.0, rng.uniform(-10.0, -6.0));
    Matrix x(1, 1), m = Matrix::Zero(1, 1), v = Matrix::Zero(1, 1);
    x(0, 0) = rng.uniform(-1.0, 1.0);
    double sx = x(0, 0), sm = 0.0, sv = 0.0;
    for (std::uint64_t t = 1; t <= 20; ++t) {
      const double g = rng.uniform(-2.0, 2.0);
      Matrix gm(1, 1);
      gm(0, 0) = g;
      auto xa = x.array();
      auto ma = m.array();
      auto va = v.array();
      adam_update(gm.array(), ma, va, xa, t, cfg);
      sm = cfg.beta1 * sm + (1 - cfg.beta1) * g;
      sv = cfg.beta2 * sv + (1 - cfg.beta2) * g * g;
      const double mh = sm / (1 - std::pow(cfg.beta1, double(t)));
      const double vh = sv / (1 - std::pow(cfg.beta2, double(t)));
      sx -= cfg.eta * mh / (std::sqrt(vh) + cfg.epsilon);
      worst = std::max(worst, std::abs(sx - x(0, 0)));
    }
  }
  return {worst <= 1e-12, "100 sequences of 20 steps, max deviation " + fmt("%.3g", worst)};
}

std::pair<bool, std::string> check_metrics() {
  Rng rng(derive_seed(0, "selfcheck-metrics"));
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t labels = trial % 2 ? 35 : 18;
    const std::size_t n = 1 + rng.below(300);
    std::vector<std::string> pred(n), gold(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = "l" + std::to_string(rng.below(labels));
      pred[i] = rng.uniform() < 0.5 ? gold[i] : "l" + std::to_string(rng.below(labels));
    }
    const ScoreResult r = score(pred, gold, Taxonomy::A);
    std::map<std::string, std::array<std::size_t, 3>> counts;  // tp, fp, fn
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred[i] == gold[i]) {
        ++counts[gold[i]][0];
        ++correct;
      } else {
        ++counts[pred[i]][1];
        ++counts[gold[i]][2];
      }
    }
    if (r.scores.correct != correct || r.scores.per_label.size() != counts.size())
      return {false, "count mismatch in trial " + std::to_string(trial)};
    for (const auto& [label, c] : counts) {
      const LabelScore* s = r.scores.find(label);
      if (!s || s->tp != c[0] || s->fp != c[1] || s->fn != c[2])
        return {false, "per-label counts differ for " + label + " in trial " + std::to_string(trial)};
      const double p = c[0] + c[1] ? double(c[0]) / double(c[0] + c[1]) : 0.0;
      const double rc = c[0] + c[2] ? double(c[0]) / double(c[0] + c[2]) : 0.0;
      const double f = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
      if (s->precision != p || s->recall != rc || s->f1 != f)
        return {false, "P/R/F1 differ for " + label + " in trial " + std::to_string(trial)};
    }
  }
  return {true, "200 random prediction vectors over 18 and 35 labels"};
}

std::pair<bool, std::string> check_checkpoint() {
  GradCheckCase c = make_gradcheck_case(GradCheckSpec{});
  const ForwardTrace t = forward(c.params, c.batch, 0);
  backward(c.params, t, c.gold, 0);
  adam_step(c.params, AdamConfig{});
  const ModelParams back = decode_checkpoint(encode_checkpoint(c.params));
  return {bit_equal(c.params, back), "encode/decode after one Adam step"};
}

}  // namespace

SelfCheckResult run_selfcheck(bool mutate_backward) {
  const std::vector<Check> checks = {
      {"gradient-check", [&] { return check_gradients(mutate_backward); }},
      {"softmax", check_softmax},
      {"adam-oracle", check_adam},
      {"metrics-oracle", check_metrics},
      {"checkpoint-roundtrip", check_checkpoint},
  };
  SelfCheckResult result;
  for (const auto& c : checks) {
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    result.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + c.name + ": " + detail);
    if (!ok && result.passed) {
      result.passed = false;
      result.failing = c.name;
    }
  }
  return result;
}

}  // namespace nci
