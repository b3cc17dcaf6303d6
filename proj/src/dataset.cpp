#include "nci/dataset.hpp"

namespace nci {

EncodedSplit encode(const Split& split, const ResolvedVocab& vocab, const LabelSpace& space_a,
                    const LabelSpace& space_b) {
  EncodedSplit out;
  out.name = split.name;
  out.inputs.reserve(split.size());
  for (const auto& r : split.records) {
    out.inputs.push_back({vocab.index(r.left), vocab.index(r.right)});
    out.gold[0].push_back(space_a.find(r.label_a).value_or(kOutOfSpace));
    out.gold[1].push_back(space_b.find(r.label_b).value_or(kOutOfSpace));
  }
  return out;
}

const Split& Dataset::split(const std::string& name) const {
  if (name == "train") return corpus.train;
  if (name == "dev") return corpus.dev;
  if (name == "test") return corpus.test;
  throw InternalError("corpus", "unknown split " + name);
}

const EncodedSplit& Dataset::encoded(const std::string& name) const {
  if (name == "train") return train;
  if (name == "dev") return dev;
  if (name == "test") return test;
  throw InternalError("corpus", "unknown split " + name);
}

Dataset make_dataset(Corpus corpus, const EmbeddingTable& table, std::uint64_t seed) {
  Dataset ds;
  ds.corpus = std::move(corpus);
  ds.vocab = build_vocab(ds.corpus, table, seed);
  ds.labels = {LabelSpace::from_train(ds.corpus.train, Taxonomy::A),
               LabelSpace::from_train(ds.corpus.train, Taxonomy::B)};
  ds.train = encode(ds.corpus.train, ds.vocab, ds.labels[0], ds.labels[1]);
  ds.dev = encode(ds.corpus.dev, ds.vocab, ds.labels[0], ds.labels[1]);
  ds.test = encode(ds.corpus.test, ds.vocab, ds.labels[0], ds.labels[1]);
  return ds;
}

}  // namespace nci
