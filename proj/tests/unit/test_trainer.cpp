#include <algorithm>
#include <map>

#include "doctest.h"
#include "nci/checkpoint.hpp"
#include "nci/trainer.hpp"
#include "synthetic.hpp"

using namespace nci;

namespace {

Dataset small_dataset(std::uint64_t seed, std::size_t train = 60, std::size_t dev = 20) {
  const auto s = testing::separable_corpus(train, dev, 10, 4, seed);
  return make_dataset(s.corpus, s.table, seed);
}

ModelParams fresh(const Dataset& d, std::uint64_t seed) {
  return init_stl_params(d.vocab.matrix, d.label_space(Taxonomy::A).size(), seed);
}

TrainHooks scripted(std::vector<double> seq, std::map<std::size_t, ModelParams>* snapshots = nullptr) {
  TrainHooks h;
  h.dev_accuracy_override = [seq](std::size_t epoch, double) { return seq.at(epoch - 1); };
  if (snapshots) h.on_epoch_end = [snapshots](const ModelParams& p, std::size_t e) { snapshots->emplace(e, p); };
  return h;
}

EncodedSplit encoded(std::vector<IndexPair> inputs, std::vector<std::size_t> gold) {
  EncodedSplit s;
  s.name = "dev";
  s.inputs = std::move(inputs);
  s.gold[0] = gold;
  s.gold[1] = gold;
  return s;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("early stopping counter") {
  EarlyStopping es(5);
  const std::vector<double> seq{.5, .6, .55, .54, .53, .52, .51};
  std::size_t stopped = 0;
  for (std::size_t e = 1; e <= seq.size(); ++e) {
    es.observe(e, seq[e - 1]);
    if (es.should_stop()) {
      stopped = e;
      break;
    }
  }
  CHECK(stopped == 7);
  CHECK(es.best_epoch() == 2);
  CHECK(es.best() == 0.6);
}

TEST_CASE("ties do not reset patience") {
  EarlyStopping es(2);
  CHECK(es.observe(1, 0.5));
  CHECK_FALSE(es.observe(2, 0.5));
  CHECK_FALSE(es.should_stop());
  CHECK_FALSE(es.observe(3, 0.5));
  CHECK(es.should_stop());
  CHECK(es.best_epoch() == 1);
}

TEST_CASE("train_stl stops after epoch 7 and restores epoch-2 weights") {
  const Dataset d = small_dataset(1);
  std::map<std::size_t, ModelParams> snaps;
  TrainConfig cfg;
  cfg.seed = 1;
  const TrainResult r =
      train_stl(fresh(d, 1), d.train, d.dev, Taxonomy::A, cfg, scripted({.5, .6, .55, .54, .53, .52, .51}, &snaps));
  CHECK(r.log.stopped_epoch == 7);
  CHECK(r.log.best_epoch == 2);
  CHECK(r.log.stop_reason == StopReason::EarlyStop);
  CHECK(r.log.epochs.size() == 7);
  CHECK(bit_equal(r.params, snaps.at(2)));
  CHECK_FALSE(bit_equal(r.params, snaps.at(7)));
}

TEST_CASE("patience equal to max_epochs never stops early") {
  const Dataset d = small_dataset(2);
  TrainConfig cfg;
  cfg.max_epochs = 7;
  cfg.patience = 7;
  const TrainResult r =
      train_stl(fresh(d, 2), d.train, d.dev, Taxonomy::A, cfg, scripted({.9, .1, .1, .1, .1, .1, .1}));
  CHECK(r.log.stopped_epoch == 7);
  CHECK(r.log.stop_reason == StopReason::MaxEpochs);
  CHECK(r.log.best_epoch == 1);
}

TEST_CASE("strictly increasing dev accuracy runs to max_epochs") {
  const Dataset d = small_dataset(3, 20, 10);
  std::vector<double> seq;
  for (int i = 1; i <= 50; ++i) seq.push_back(i / 100.0);
  TrainConfig cfg;
  const TrainResult r = train_stl(fresh(d, 3), d.train, d.dev, Taxonomy::A, cfg, scripted(seq));
  CHECK(r.log.stop_reason == StopReason::MaxEpochs);
  CHECK(r.log.best_epoch == 50);
  CHECK(r.log.stopped_epoch == 50);
}

TEST_CASE("the last partial batch is trained on") {
  const Dataset d = small_dataset(4, 7, 5);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.patience = 1;
  const TrainResult r = train_stl(fresh(d, 4), d.train, d.dev, Taxonomy::A, cfg);
  CHECK(r.params.embedding.step_count == 2);
}

TEST_CASE("invalid configurations and empty splits are rejected") {
  TrainConfig cfg;
  cfg.patience = 60;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);

  const Dataset d = small_dataset(5);
  EncodedSplit empty;
  CHECK_THROWS_AS(train_stl(fresh(d, 5), d.train, empty, Taxonomy::A, TrainConfig{}), InputError);
  CHECK_THROWS_AS(train_stl(fresh(d, 5), empty, d.dev, Taxonomy::A, TrainConfig{}), InputError);
}

TEST_CASE("epoch order is a seeded permutation") {
  const auto a = epoch_order(100, 9, 1);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  CHECK(a == epoch_order(100, 9, 1));
  CHECK(a != epoch_order(100, 9, 2));
  CHECK(a != epoch_order(100, 10, 1));
}

TEST_CASE("separable data is fit perfectly at the best epoch") {
  const auto s = testing::separable_corpus(200, 50, 50, 8, 21);
  const Dataset d = make_dataset(s.corpus, s.table, 21);
  TrainConfig cfg;
  cfg.seed = 21;
  const TrainResult r = train_stl(fresh(d, 21), d.train, d.dev, Taxonomy::A, cfg);
  CHECK(evaluate_accuracy(r.params, d.train, Taxonomy::A) == 1.0);

  // Log invariants and best-snapshot restore.
  CHECK(r.log.best_epoch <= r.log.stopped_epoch);
  double best = 0;
  for (const auto& e : r.log.epochs) best = std::max(best, e.dev_accuracy);
  CHECK(r.log.epochs.at(r.log.best_epoch - 1).dev_accuracy == best);
  CHECK(evaluate_accuracy(r.params, d.dev, Taxonomy::A) == best);
}

TEST_CASE("training is deterministic") {
  const Dataset d = small_dataset(6);
  TrainConfig cfg;
  cfg.seed = 6;
  const TrainResult a = train_stl(fresh(d, 6), d.train, d.dev, Taxonomy::A, cfg);
  const TrainResult b = train_stl(fresh(d, 6), d.train, d.dev, Taxonomy::A, cfg);
  CHECK(bit_equal(a.params, b.params));
  REQUIRE(a.log.epochs.size() == b.log.epochs.size());
  for (std::size_t i = 0; i < a.log.epochs.size(); ++i) {
    CHECK(a.log.epochs[i].train_loss == b.log.epochs[i].train_loss);
    CHECK(a.log.epochs[i].dev_accuracy == b.log.epochs[i].dev_accuracy);
  }
}

TEST_CASE("evaluate_accuracy: zero weights predict class 0") {
  ModelParams p = init_stl_params(Matrix::Zero(4, 3), 2, 1);
  p.for_each_tensor([](ParamTensor& t) { t.values.setZero(); });
  const EncodedSplit s = encoded({{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {0, 1, 0, 1});
  CHECK(evaluate_accuracy(p, s, Taxonomy::A) == 0.5);
  for (const auto& pr : predict(p, s)) CHECK(pr.label == 0);
}

TEST_CASE("evaluate_accuracy: out-of-space gold labels are errors") {
  ModelParams p = init_stl_params(Matrix::Zero(4, 3), 2, 1);
  const EncodedSplit s = encoded({{0, 1}, {1, 2}}, {kOutOfSpace, kOutOfSpace});
  CHECK(evaluate_accuracy(p, s, Taxonomy::A) == 0.0);
}

TEST_CASE("evaluate_accuracy: hand-built weights get 3 of 4") {
  Matrix emb(4, 1);
  emb << -1, 1, -1, 1;
  ModelParams p = init_stl_params(emb, 2, 1);
  p.hidden[0].weight.values << 1, 0;  // hidden = sigmoid(left)
  p.heads[0].weight.values << -10, 10;
  p.heads[0].bias.values << 5, -5;
  const EncodedSplit s = encoded({{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {0, 1, 0, 0});
  CHECK(evaluate_accuracy(p, s, Taxonomy::A) == 0.75);
  const auto preds = predict(p, s);
  CHECK(accuracy(preds, s.gold[0]) == 0.75);
  CHECK(preds[1].label == 1);
  CHECK(preds[1].probs.sum() == doctest::Approx(1.0));
}

TEST_CASE("predict: uniform ties go to index 0, one-hot logits to their class") {
  ModelParams p = init_stl_params(Matrix::Zero(2, 2), 3, 1);
  p.for_each_tensor([](ParamTensor& t) { t.values.setZero(); });
  const EncodedSplit s = encoded({{0, 1}}, {2});
  CHECK(predict(p, s)[0].label == 0);
  p.heads[0].bias.values << 0, 0, 100;
  const auto pr = predict(p, s)[0];
  CHECK(pr.label == 2);
  CHECK(pr.probs(2) == doctest::Approx(1.0));
}

}  // TEST_SUITE
