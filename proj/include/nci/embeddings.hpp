#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "nci/corpus.hpp"
#include "nci/types.hpp"

namespace nci {

struct EmbeddingLoadReport {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::size_t duplicates = 0;
};

// Pretrained word vectors. Lookup is exact-match on the raw string.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, RowVector> entries;
  RowVector unk_vector;
  EmbeddingLoadReport report;

  const RowVector* find(const std::string& word) const {
    auto it = entries.find(word);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// Seeded uniform in [-0.25, 0.25].
RowVector unknown_vector(std::size_t dim, std::uint64_t seed);

// Text format: one `word v1 ... vdim` per line, single-space separated.
// Lines of the wrong length or with non-finite values are skipped; repeated
// words keep their first occurrence. Throws InputError if nothing loads.
// unk_vector is unknown_vector(dim, unk_seed).
EmbeddingTable parse_embeddings(const std::string& text, std::size_t expected_dim, std::uint64_t unk_seed = 0);
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t expected_dim,
                               std::uint64_t unk_seed = 0);

enum class ResolveRule { Exact = 1, Lowercase = 2, HyphenAverage = 3, Unknown = 4 };

const char* to_string(ResolveRule rule);

struct Resolved {
  RowVector vector;
  ResolveRule rule;
};

// Fallback chain: exact, lowercase (if any uppercase character), average of
// hyphen-separated parts found by the first two rules, then unk_vector.
Resolved resolve(const std::string& word, const EmbeddingTable& table);

struct ResolvedVocab {
  std::map<std::string, std::size_t> index_of;
  Matrix matrix;
  std::size_t unk_index = 0;
  std::map<std::string, ResolveRule> resolution_log;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t index(const std::string& word) const {
    auto it = index_of.find(word);
    return it == index_of.end() ? unk_index : it->second;
  }
  std::map<ResolveRule, std::size_t> rule_counts() const;
};

// One row per distinct constituent across all splits (sorted), resolved
// against the table with its unk vector replaced by unknown_vector(dim, seed);
// that unk vector is appended as the last row.
ResolvedVocab build_vocab(const Corpus& corpus, const EmbeddingTable& table, std::uint64_t seed);

}  // namespace nci
