#include "doctest.h"
#include "nci/checkpoint.hpp"
#include "nci/transfer.hpp"
#include "synthetic.hpp"

using namespace nci;

namespace {

Dataset paired(std::uint64_t seed, std::size_t train = 80) {
  const auto s = testing::separable_corpus(train, 20, 20, 4, seed);
  return make_dataset(s.corpus, s.table, seed);
}

TrainConfig quick(std::uint64_t seed, std::size_t epochs = 4) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.max_epochs = epochs;
  cfg.patience = std::min<std::size_t>(2, epochs);
  return cfg;
}

bool moments_zero(const ModelParams& p) {
  bool ok = true;
  p.for_each_tensor([&](const ParamTensor& t) { ok = ok && t.m.isZero(0.0) && t.v.isZero(0.0) && t.step_count == 0; });
  return ok;
}

std::vector<IndexPair> first_inputs(const Dataset& d, std::size_t n) {
  return {d.train.inputs.begin(), d.train.inputs.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

TEST_SUITE("transfer") {

TEST_CASE("build_tl copies exactly the designated layers") {
  const Dataset d = paired(1);
  const auto cfg = quick(1);
  const LabelSpace& rec = d.label_space(Taxonomy::A);
  const TrainResult donor = train_stl(init_stl_params(d.vocab.matrix, d.label_space(Taxonomy::B).size(), 1), d.train,
                                      d.dev, Taxonomy::B, cfg);
  const ModelParams cold = init_stl_params(d.vocab.matrix, rec.size(), 1);

  for (TransferLayers layers : {TransferLayers::None, TransferLayers::E, TransferLayers::H, TransferLayers::EH}) {
    CAPTURE(to_string(layers));
    const ModelParams p = build_tl(donor.params, {layers, Taxonomy::B}, rec, d.vocab.matrix, 1);
    const bool e = layers == TransferLayers::E || layers == TransferLayers::EH;
    const bool h = layers == TransferLayers::H || layers == TransferLayers::EH;
    CHECK(bit_equal(p.embedding.values, e ? donor.params.embedding.values : cold.embedding.values));
    CHECK(bit_equal(p.hidden[0].weight.values, h ? donor.params.hidden[0].weight.values : cold.hidden[0].weight.values));
    CHECK(bit_equal(p.hidden[0].bias.values, h ? donor.params.hidden[0].bias.values : cold.hidden[0].bias.values));
    CHECK(bit_equal(p.heads[0].weight.values, cold.heads[0].weight.values));
    CHECK(p.num_classes(0) == rec.size());
    CHECK(moments_zero(p));
  }
}

TEST_CASE("mode H with an all-ones donor hidden layer") {
  const Dataset d = paired(2);
  ModelParams donor = init_stl_params(d.vocab.matrix, 4, 99);
  donor.hidden[0].weight.values.setOnes();
  donor.hidden[0].bias.values.setOnes();
  donor.embedding.values.setConstant(7.0);
  const ModelParams p = build_tl(donor, {TransferLayers::H, Taxonomy::B}, d.label_space(Taxonomy::A), d.vocab.matrix, 2);
  CHECK((p.hidden[0].weight.values.array() == 1.0).all());
  CHECK((p.hidden[0].bias.values.array() == 1.0).all());
  CHECK(bit_equal(p.embedding.values, d.vocab.matrix));
}

TEST_CASE("build_tl rejects a donor of a different shape") {
  const Dataset d = paired(3);
  const ModelParams donor = init_stl_params(Matrix::Ones(3, 4), 2, 1);
  CHECK_THROWS_AS(build_tl(donor, {TransferLayers::E, Taxonomy::B}, d.label_space(Taxonomy::A), d.vocab.matrix, 1),
                  InputError);
}

TEST_CASE("the no-transfer control equals plain single-task training") {
  const Dataset d = paired(4);
  const auto cfg = quick(4);
  const TlResult tl = train_tl(d, {TransferLayers::None, Taxonomy::B}, cfg);
  const TrainResult stl =
      train_stl(init_stl_params(d.vocab.matrix, d.label_space(Taxonomy::A).size(), 4), d.train, d.dev, Taxonomy::A, cfg);
  CHECK_FALSE(tl.donor.has_value());
  CHECK(bit_equal(tl.recipient.params, stl.params));
}

TEST_CASE("mode E starts the recipient from moved embeddings") {
  const Dataset d = paired(5);
  ModelParams start;
  TrainHooks hooks;
  hooks.on_start = [&](const ModelParams& p) { start = p; };
  const TlResult r = train_tl(d, {TransferLayers::E, Taxonomy::B}, quick(5), hooks);
  REQUIRE(r.donor.has_value());
  CHECK(bit_equal(start.embedding.values, r.donor->params.embedding.values));
  CHECK_FALSE(bit_equal(start.embedding.values, d.vocab.matrix));
  CHECK_FALSE(r.donor->log.epochs.empty());
  CHECK_FALSE(r.recipient.log.epochs.empty());
}

TEST_CASE("sharing F couples both heads, sharing E isolates them") {
  const Dataset d = paired(6);
  const auto batch = first_inputs(d, 6);
  for (Sharing s : {Sharing::F, Sharing::E}) {
    ModelParams p = init_mtl_params(d, {s, Taxonomy::A}, 6);
    const Matrix main0 = forward(p, batch, 0).probs;
    const Matrix aux0 = forward(p, batch, 1).probs;
    p.hidden_of(0).weight.values(0, 0) += 0.5;
    const bool main_changed = !bit_equal(forward(p, batch, 0).probs, main0);
    const bool aux_changed = !bit_equal(forward(p, batch, 1).probs, aux0);
    CHECK(main_changed);
    CHECK(aux_changed == (s == Sharing::F));
  }
}

TEST_CASE("task-specific tensors get no gradient from the other task") {
  const Dataset d = paired(7);
  const auto batch = first_inputs(d, 5);
  std::vector<std::size_t> gold(d.train.gold_for(Taxonomy::B).begin(), d.train.gold_for(Taxonomy::B).begin() + 5);
  ModelParams p = init_mtl_params(d, {Sharing::E, Taxonomy::A}, 7);
  backward(p, forward(p, batch, 1), gold, 1);
  CHECK(p.hidden[0].weight.grad.isZero(0.0));
  CHECK(p.heads[0].weight.grad.isZero(0.0));
  CHECK(p.heads[0].bias.grad.isZero(0.0));
  CHECK_FALSE(p.hidden[1].weight.grad.isZero(0.0));
}

TEST_CASE("shared gradients are the sum of the per-task gradients") {
  const Dataset d = paired(8);
  for (Sharing s : {Sharing::E, Sharing::F}) {
    const ModelParams p = init_mtl_params(d, {s, Taxonomy::A}, 8);
    const auto batch = first_inputs(d, 5);
    std::vector<std::size_t> ga(d.train.gold_for(Taxonomy::A).begin(), d.train.gold_for(Taxonomy::A).begin() + 5);
    std::vector<std::size_t> gb(d.train.gold_for(Taxonomy::B).begin(), d.train.gold_for(Taxonomy::B).begin() + 5);
    ModelParams both = p, main = p, aux = p;
    accumulate_mtl_gradients(both, batch, ga, gb, 1.0);
    backward(main, forward(main, batch, 0), ga, 0);
    backward(aux, forward(aux, batch, 1), gb, 1);
    const Matrix sum = main.embedding.grad + aux.embedding.grad;
    CHECK((both.embedding.grad - sum).cwiseAbs().maxCoeff() <= 1e-12);
    if (s == Sharing::F)
      CHECK((both.hidden[0].weight.grad - main.hidden[0].weight.grad - aux.hidden[0].weight.grad).cwiseAbs().maxCoeff() <=
            1e-12);
  }
}

TEST_CASE("aux weight 0 reproduces single-task training") {
  const Dataset d = paired(9);
  TrainConfig cfg = quick(9, 3);
  cfg.patience = 3;
  const TrainResult mtl = train_mtl(d, {Sharing::F, Taxonomy::A}, cfg, 0.0);
  const TrainResult stl =
      train_stl(init_stl_params(d.vocab.matrix, d.label_space(Taxonomy::A).size(), 9), d.train, d.dev, Taxonomy::A, cfg);
  CHECK(bit_equal(mtl.params.embedding.values, stl.params.embedding.values));
  CHECK(bit_equal(mtl.params.hidden[0].weight.values, stl.params.hidden[0].weight.values));
  CHECK(bit_equal(mtl.params.heads[0].weight.values, stl.params.heads[0].weight.values));
  CHECK(bit_equal(mtl.params.heads[0].bias.values, stl.params.heads[0].bias.values));
}

TEST_CASE("multi-task stopping ignores the auxiliary accuracy") {
  const Dataset d = paired(10);
  const TrainConfig cfg = quick(10, 8);
  auto run = [&](std::vector<double> aux) {
    TrainHooks h;
    h.dev_accuracy_override = [](std::size_t e, double) { return e == 2 ? 0.9 : 0.1 * static_cast<double>(e % 2); };
    h.aux_accuracy_override = [aux](std::size_t e, double) { return aux.at(e - 1); };
    return train_mtl(d, {Sharing::E, Taxonomy::B}, cfg, 1.0, h);
  };
  const TrainResult a = run({.1, .2, .3, .4, .5, .6, .7, .8});
  const TrainResult b = run({.9, .1, .9, .1, .9, .1, .9, .1});
  CHECK(a.log.best_epoch == 2);
  CHECK(a.log.stopped_epoch == 4);
  CHECK(b.log.best_epoch == a.log.best_epoch);
  CHECK(b.log.stopped_epoch == a.log.stopped_epoch);
  CHECK(bit_equal(a.params, b.params));
  CHECK(a.log.epochs[0].aux_dev_accuracy == 0.1);
  CHECK(b.log.epochs[0].aux_dev_accuracy == 0.9);
}

TEST_CASE("all four multi-task configurations train and log both tasks") {
  const Dataset d = paired(11);
  for (Sharing s : {Sharing::E, Sharing::F})
    for (Taxonomy m : {Taxonomy::A, Taxonomy::B}) {
      const TrainResult r = train_mtl(d, {s, m}, quick(11, 3));
      CHECK(r.params.num_classes(0) == d.label_space(m).size());
      CHECK(r.params.num_classes(1) == d.label_space(other(m)).size());
      for (const auto& e : r.log.epochs) CHECK(e.aux_dev_accuracy.has_value());
    }
}

}  // TEST_SUITE
