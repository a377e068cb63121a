#pragma once

// Keyed partition of the vocabulary into r disjoint tag subsets. The key seeds
// a pseudorandom permutation of the token ids; contiguous blocks of the
// permutation become the subsets, so the r subset sizes differ by at most one.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "patmark/errors.hpp"
#include "patmark/pattern.hpp"
#include "patmark/random.hpp"

namespace patmark {

struct VocabPartition {
  std::int32_t vocab_size = 0;
  std::uint64_t key = 0;
  std::vector<Tag> assignment;          // token id -> tag, total over [0, vocab_size)
  std::vector<std::int32_t> subset_sizes;  // length r

  int tag_count() const { return static_cast<int>(subset_sizes.size()); }

  // Token ids carrying the given tag, ascending.
  std::vector<std::int32_t> subset(Tag tag) const {
    std::vector<std::int32_t> out;
    out.reserve(static_cast<std::size_t>(subset_sizes[static_cast<std::size_t>(tag)]));
    for (std::int32_t u = 0; u < vocab_size; ++u)
      if (assignment[static_cast<std::size_t>(u)] == tag) out.push_back(u);
    return out;
  }
};

inline VocabPartition partition_vocabulary(std::int32_t vocab_size, int r,
                                           std::uint64_t key) {
  if (r < 1) throw ConfigError("tag count must be >= 1");
  if (vocab_size < r)
    throw ConfigError("vocab_size must be >= tag count (" +
                      std::to_string(vocab_size) + " < " + std::to_string(r) + ")");
  std::vector<std::int32_t> perm(static_cast<std::size_t>(vocab_size));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(key, "vocab-partition"));
  rng.shuffle(perm);

  VocabPartition part;
  part.vocab_size = vocab_size;
  part.key = key;
  part.assignment.assign(static_cast<std::size_t>(vocab_size), 0);
  part.subset_sizes.assign(static_cast<std::size_t>(r), 0);
  std::size_t cursor = 0;
  for (int tag = 0; tag < r; ++tag) {
    std::int32_t size = vocab_size / r + (tag < vocab_size % r ? 1 : 0);
    part.subset_sizes[static_cast<std::size_t>(tag)] = size;
    for (std::int32_t i = 0; i < size; ++i)
      part.assignment[static_cast<std::size_t>(perm[cursor++])] =
          static_cast<Tag>(tag);
  }
  return part;
}

inline Tag tag_of_token(std::int32_t token, const VocabPartition& partition) {
  if (token < 0 || token >= partition.vocab_size)
    throw DataError("token id " + std::to_string(token) +
                    " outside vocabulary of size " +
                    std::to_string(partition.vocab_size));
  return partition.assignment[static_cast<std::size_t>(token)];
}

inline std::vector<Tag> tags_of_tokens(const std::vector<std::int32_t>& tokens,
                                       const VocabPartition& partition) {
  std::vector<Tag> tags;
  tags.reserve(tokens.size());
  for (std::int32_t t : tokens) tags.push_back(tag_of_token(t, partition));
  return tags;
}

// Token i carries tag i; lets tag-level sequences reuse token machinery.
inline VocabPartition identity_partition(std::int32_t r) {
  if (r < 1) throw ConfigError("need at least one tag");
  VocabPartition part;
  part.vocab_size = r;
  part.key = 0;
  part.assignment.resize(static_cast<std::size_t>(r));
  for (std::int32_t i = 0; i < r; ++i)
    part.assignment[static_cast<std::size_t>(i)] = static_cast<Tag>(i);
  part.subset_sizes.assign(static_cast<std::size_t>(r), 1);
  return part;
}

// One "id,letter" pair per line.
inline void export_partition_csv(const VocabPartition& partition,
                                 const Pattern& pattern, std::ostream& os) {
  for (std::int32_t u = 0; u < partition.vocab_size; ++u) {
    const Tag tag = partition.assignment[static_cast<std::size_t>(u)];
    os << u << ',' << pattern.letters[static_cast<std::size_t>(tag)] << '\n';
  }
}

}  // namespace patmark
