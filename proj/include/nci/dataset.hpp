#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nci/corpus.hpp"
#include "nci/embeddings.hpp"

namespace nci {

// Gold index for a label that is not in the train label space.
inline constexpr std::size_t kOutOfSpace = std::numeric_limits<std::size_t>::max();

// A split mapped to vocabulary rows and class indices for both taxonomies.
struct EncodedSplit {
  std::string name;
  std::vector<IndexPair> inputs;
  std::array<std::vector<std::size_t>, 2> gold;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
  const std::vector<std::size_t>& gold_for(Taxonomy t) const { return gold[column(t)]; }
};

EncodedSplit encode(const Split& split, const ResolvedVocab& vocab, const LabelSpace& space_a,
                    const LabelSpace& space_b);

struct Dataset {
  Corpus corpus;
  ResolvedVocab vocab;
  std::array<LabelSpace, 2> labels;
  EncodedSplit train;
  EncodedSplit dev;
  EncodedSplit test;

  const LabelSpace& label_space(Taxonomy t) const { return labels[column(t)]; }
  const Split& split(const std::string& name) const;
  const EncodedSplit& encoded(const std::string& name) const;
};

Dataset make_dataset(Corpus corpus, const EmbeddingTable& table, std::uint64_t seed);

}  // namespace nci
