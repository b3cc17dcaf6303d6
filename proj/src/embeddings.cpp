#include "nci/embeddings.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nci/random.hpp"

namespace nci {

RowVector unknown_vector(std::size_t dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "unk"));
  RowVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-0.25, 0.25);
  return v;
}

EmbeddingTable parse_embeddings(const std::string& text, std::size_t expected_dim, std::uint64_t unk_seed) {
  if (expected_dim == 0) throw InputError("embeddings", "expected dimension must be positive");
  EmbeddingTable table;
  table.dim = expected_dim;
  RowVector row(static_cast<Eigen::Index>(expected_dim));

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const std::size_t sp = line.find(' ');
    if (sp == 0 || sp == std::string_view::npos) {
      ++table.report.skipped;
      continue;
    }
    const std::string word(line.substr(0, sp));
    const char* p = line.data() + sp + 1;
    const char* end = line.data() + line.size();
    std::size_t n = 0;
    bool ok = true;
    while (ok && p <= end) {
      if (n == expected_dim) {
        ok = false;
        break;
      }
      double x = 0.0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || !std::isfinite(x)) {
        ok = false;
        break;
      }
      row(static_cast<Eigen::Index>(n++)) = x;
      if (next == end) break;
      if (*next != ' ') {
        ok = false;
        break;
      }
      p = next + 1;
    }
    if (!ok || n != expected_dim) {
      ++table.report.skipped;
      continue;
    }
    if (!table.entries.emplace(word, row).second) {
      ++table.report.duplicates;
      continue;
    }
    ++table.report.loaded;
  }
  if (table.entries.empty()) throw InputError("embeddings", "no usable embedding lines");
  table.unk_vector = unknown_vector(expected_dim, unk_seed);
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t expected_dim,
                               std::uint64_t unk_seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("embeddings", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_embeddings(ss.str(), expected_dim, unk_seed);
}

const char* to_string(ResolveRule rule) {
  switch (rule) {
    case ResolveRule::Exact: return "exact";
    case ResolveRule::Lowercase: return "lowercase";
    case ResolveRule::HyphenAverage: return "hyphen-average";
    case ResolveRule::Unknown: return "unknown";
  }
  return "?";
}

namespace {

std::string to_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool has_upper(const std::string& s) {
  for (unsigned char c : s)
    if (std::isupper(c)) return true;
  return false;
}

const RowVector* lookup_direct(const std::string& word, const EmbeddingTable& table) {
  if (const RowVector* v = table.find(word)) return v;
  if (has_upper(word)) return table.find(to_lower(word));
  return nullptr;
}

Resolved resolve_with(const std::string& word, const EmbeddingTable& table, const RowVector& unk) {
  if (const RowVector* v = table.find(word)) return {*v, ResolveRule::Exact};
  if (has_upper(word))
    if (const RowVector* v = table.find(to_lower(word))) return {*v, ResolveRule::Lowercase};

  if (word.find('-') != std::string::npos) {
    RowVector sum = RowVector::Zero(static_cast<Eigen::Index>(table.dim));
    std::size_t found = 0;
    std::size_t start = 0;
    while (start <= word.size()) {
      std::size_t dash = word.find('-', start);
      if (dash == std::string::npos) dash = word.size();
      const std::string part = word.substr(start, dash - start);
      if (!part.empty())
        if (const RowVector* v = lookup_direct(part, table)) {
          sum += *v;
          ++found;
        }
      start = dash + 1;
    }
    if (found > 0) return {sum / static_cast<double>(found), ResolveRule::HyphenAverage};
  }
  return {unk, ResolveRule::Unknown};
}

}  // namespace

Resolved resolve(const std::string& word, const EmbeddingTable& table) {
  return resolve_with(word, table, table.unk_vector);
}

std::map<ResolveRule, std::size_t> ResolvedVocab::rule_counts() const {
  std::map<ResolveRule, std::size_t> counts;
  for (const auto& [word, rule] : resolution_log) ++counts[rule];
  return counts;
}

ResolvedVocab build_vocab(const Corpus& corpus, const EmbeddingTable& table, std::uint64_t seed) {
  std::set<std::string> words;
  for (const Split* s : {&corpus.train, &corpus.dev, &corpus.test})
    for (const auto& r : s->records) {
      words.insert(r.left);
      words.insert(r.right);
    }

  const RowVector unk = unknown_vector(table.dim, seed);

  ResolvedVocab vocab;
  vocab.matrix.resize(static_cast<Eigen::Index>(words.size() + 1), static_cast<Eigen::Index>(table.dim));
  Eigen::Index row = 0;
  for (const auto& w : words) {
    Resolved res = resolve_with(w, table, unk);
    vocab.matrix.row(row) = res.vector;
    vocab.index_of.emplace(w, static_cast<std::size_t>(row));
    vocab.resolution_log.emplace(w, res.rule);
    ++row;
  }
  vocab.unk_index = static_cast<std::size_t>(row);
  vocab.matrix.row(row) = unk;
  return vocab;
}

}  // namespace nci
