#include <cmath>
#include <limits>

#include "doctest.h"
#include "nci/checkpoint.hpp"
#include "nci/nncore.hpp"
#include "nci/random.hpp"
#include "oracles.hpp"

using namespace nci;

namespace {

Matrix random_rows(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

ModelParams zero_model(Eigen::Index vocab, Eigen::Index dim, std::size_t classes) {
  ModelParams p = init_stl_params(Matrix::Zero(vocab, dim), classes, 1);
  p.for_each_tensor([](ParamTensor& t) { t.values.setZero(); });
  return p;
}

}  // namespace

TEST_SUITE("nncore") {

TEST_CASE("zero weights give uniform probabilities") {
  ModelParams p = zero_model(4, 3, 5);
  std::vector<IndexPair> batch{{0, 1}, {3, 2}, {1, 1}};
  ForwardTrace t = forward(p, batch, 0);
  CHECK(t.probs.rows() == 3);
  CHECK((t.probs.array() - 0.2).abs().maxCoeff() < 1e-15);
}

TEST_CASE("softmax examples") {
  Matrix z(2, 2);
  z << std::log(2.0), 0.0, 1000.0, 0.0;
  Matrix p = softmax_rows(z);
  CHECK(std::abs(p(0, 0) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(p(0, 1) - 1.0 / 3.0) < 1e-12);
  CHECK(p.allFinite());
  CHECK(p(1, 0) == 1.0);
  CHECK(p(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("softmax rows sum to one and ignore constant shifts") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto k = static_cast<Eigen::Index>(2 + rng.below(40));
    Matrix z(3, k);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.uniform(-300.0, 300.0);
    Matrix shifted = z;
    shifted.row(1).array() += rng.uniform(-500.0, 500.0);
    const Matrix p = softmax_rows(z);
    const Matrix q = softmax_rows(shifted);
    CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
    CHECK((p.row(1) - q.row(1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p.array() >= 0.0).all());
  }
}

TEST_CASE("cross-entropy examples") {
  ForwardTrace t;
  t.probs = Matrix(1, 2);
  t.probs << 1.0, 0.0;
  std::vector<std::size_t> g0{0};
  CHECK(loss(t, g0) == 0.0);

  t.probs << 0.5, 0.5;
  std::vector<std::size_t> g1{1};
  CHECK(loss(t, g1) == doctest::Approx(0.693147).epsilon(1e-6));

  t.probs = Matrix(2, 2);
  t.probs << 0.5, 0.5, 0.25, 0.75;
  std::vector<std::size_t> g{0, 1};
  CHECK(std::abs(loss(t, g) - (std::log(2.0) + std::log(4.0 / 3.0)) / 2) < 1e-15);
}

TEST_CASE("zero probability of the gold class is floored") {
  ForwardTrace t;
  t.probs = Matrix(1, 2);
  t.probs << 1.0, 0.0;
  std::vector<std::size_t> g{1};
  const double l = loss(t, g);
  CHECK(std::isfinite(l));
  CHECK(l == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("forward rejects out-of-range indices") {
  ModelParams p = zero_model(3, 2, 2);
  std::vector<IndexPair> batch{{0, 3}};
  CHECK_THROWS_AS(forward(p, batch, 0), InputError);
}

TEST_CASE("output-layer gradient is (p - onehot) outer hidden activation") {
  ModelParams p = init_stl_params(random_rows(5, 3, 2), 4, 9);
  std::vector<IndexPair> batch{{1, 4}};
  std::vector<std::size_t> gold{2};
  ForwardTrace t = forward(p, batch, 0);
  backward(p, t, gold, 0);
  RowVector delta = t.probs.row(0);
  delta(2) -= 1.0;
  const Matrix expected = t.hidden_act.transpose() * delta;
  CHECK((p.heads[0].weight.grad - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p.heads[0].bias.grad - delta).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("embedding gradient touches only rows in the batch") {
  ModelParams p = init_stl_params(random_rows(6, 3, 3), 3, 4);
  std::vector<IndexPair> batch{{1, 4}, {4, 2}};
  std::vector<std::size_t> gold{0, 2};
  backward(p, forward(p, batch, 0), gold, 0);
  for (Eigen::Index r : {0, 3, 5}) CHECK(p.embedding.grad.row(r).isZero(0.0));
  for (Eigen::Index r : {1, 2, 4}) CHECK(!p.embedding.grad.row(r).isZero(0.0));
}

TEST_CASE("a saturated correct prediction has exactly zero gradient") {
  ModelParams p = zero_model(3, 2, 2);
  p.heads[0].bias.values(0, 0) = 1000.0;
  std::vector<IndexPair> batch{{0, 1}};
  std::vector<std::size_t> gold{0};
  ForwardTrace t = forward(p, batch, 0);
  CHECK(t.probs(0, 0) == 1.0);
  backward(p, t, gold, 0);
  p.for_each_tensor([](const ParamTensor& x) { CHECK(x.grad.isZero(0.0)); });
  const GradCheckReport r = gradient_check(p, batch, gold, 0, 1e-4);
  CHECK(r.max_relative_error == 0.0);
}

TEST_CASE("gradient check on the seed-7 model") {
  const GradCheckReport r = gradient_check(GradCheckSpec{}, 1e-4);
  CHECK(r.passed());
  CHECK(r.max_relative_error < 1e-4);
  CHECK(r.coordinates_checked > 0);
}

TEST_CASE("gradient check catches a sign-flipped hidden bias gradient") {
  BackwardOptions opts;
  opts.flip_hidden_bias_sign = true;
  const GradCheckReport r = gradient_check(GradCheckSpec{}, 1e-4, opts);
  CHECK_FALSE(r.passed());
  CHECK(r.max_relative_error > 1e-1);
  CHECK(r.worst_tensor == "hidden.bias");
}

TEST_CASE("gradient accumulation is additive across batches") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p = init_stl_params(random_rows(8, 4, 100 + trial), 3, trial);
    std::vector<IndexPair> a, b, ab;
    std::vector<std::size_t> ga, gb, gab;
    for (int i = 0; i < 4; ++i) {
      a.push_back({rng.below(8), rng.below(8)});
      ga.push_back(rng.below(3));
      b.push_back({rng.below(8), rng.below(8)});
      gb.push_back(rng.below(3));
    }
    ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    gab = ga;
    gab.insert(gab.end(), gb.begin(), gb.end());

    BackwardOptions unit;
    unit.item_weight = 1.0;
    ModelParams split = p;
    backward(split, forward(split, a, 0), ga, 0, unit);
    backward(split, forward(split, b, 0), gb, 0, unit);
    ModelParams joint = p;
    backward(joint, forward(joint, ab, 0), gab, 0, unit);

    std::vector<const ParamTensor*> xs, ys;
    split.for_each_tensor([&](const ParamTensor& t) { xs.push_back(&t); });
    joint.for_each_tensor([&](const ParamTensor& t) { ys.push_back(&t); });
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK((xs[i]->grad - ys[i]->grad).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("adam: zero gradient leaves values and counts the step") {
  ModelParams p = init_stl_params(random_rows(4, 2, 1), 2, 3);
  const ModelParams before = p;
  adam_step(p, AdamConfig{});
  CHECK(bit_equal(p.embedding.values, before.embedding.values));
  CHECK(bit_equal(p.heads[0].weight.values, before.heads[0].weight.values));
  p.for_each_tensor([](const ParamTensor& t) { CHECK(t.step_count == 1); });
}

TEST_CASE("adam: first step with g=1") {
  Matrix x = Matrix::Zero(1, 1), m = x, v = x, g = Matrix::Ones(1, 1);
  auto xa = x.array();
  auto ma = m.array();
  auto va = v.array();
  adam_update(g.array(), ma, va, xa, 1, AdamConfig{});
  CHECK(std::abs(x(0, 0) - (-0.001 / (1 + 1e-8))) < 1e-18);
  CHECK(x(0, 0) == doctest::Approx(-0.0009999999));
}

TEST_CASE("adam: g=1 then g=-1 follows the scripted recurrence") {
  ModelParams p = zero_model(2, 1, 2);
  testing::ScriptedAdam ref;
  for (double g : {1.0, -1.0}) {
    p.heads[0].bias.grad(0, 0) = g;
    adam_step(p, AdamConfig{});
    CHECK(std::abs(p.heads[0].bias.values(0, 0) - ref.step(g)) < 1e-12);
  }
  CHECK(p.heads[0].bias.step_count == 2);
  CHECK(p.heads[0].bias.grad.isZero(0.0));
}

TEST_CASE("adam rejects non-finite gradients and names the tensor") {
  ModelParams p = zero_model(2, 1, 2);
  p.hidden[0].weight.grad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    adam_step(p, AdamConfig{});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("hidden.weight") != std::string::npos);
  }
}

TEST_CASE("initialization: Glorot bounds, zero biases, deterministic") {
  const Matrix emb = random_rows(10, 6, 4);
  ModelParams a = init_stl_params(emb, 5, 42);
  ModelParams b = init_stl_params(emb, 5, 42);
  ModelParams c = init_stl_params(emb, 5, 43);
  CHECK(bit_equal(a, b));
  CHECK_FALSE(bit_equal(a, c));
  CHECK(bit_equal(a.embedding.values, emb));
  CHECK(a.hidden[0].weight.rows() == 12);
  CHECK(a.hidden[0].weight.cols() == 6);
  CHECK(a.hidden[0].weight.values.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 18.0));
  CHECK(a.heads[0].weight.values.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 11.0));
  CHECK(a.hidden[0].bias.values.isZero(0.0));
  CHECK(a.heads[0].bias.values.isZero(0.0));
}

TEST_CASE("dual initialization shares the hidden layer only under F") {
  const Matrix emb = random_rows(6, 3, 8);
  ModelParams f = init_dual_params(emb, 4, 2, true, 1);
  ModelParams e = init_dual_params(emb, 4, 2, false, 1);
  CHECK(f.hidden.size() == 1);
  CHECK(&f.hidden_of(0) == &f.hidden_of(1));
  CHECK(e.hidden.size() == 2);
  CHECK(&e.hidden_of(0) != &e.hidden_of(1));
  CHECK(f.num_classes(0) == 4);
  CHECK(f.num_classes(1) == 2);
}

}  // TEST_SUITE
