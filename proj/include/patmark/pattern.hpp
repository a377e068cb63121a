#pragma once

// Tags, cyclic tag patterns, and the set of valid tag windows. A pattern is an
// ordered tag sequence of period R over r distinct tags, repeated cyclically
// over token positions; detection asks whether an observed tag window equals
// some length-w slice of that infinite repetition.

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "patmark/errors.hpp"

namespace patmark {

// Dense tag id in [0, r).
using Tag = std::int32_t;

struct Pattern {
  std::vector<Tag> tags;  // length R, every id in [0, r) appears at least once
  std::string letters;    // letters[tag] is the display letter for that tag

  int period() const { return static_cast<int>(tags.size()); }
  int tag_count() const { return static_cast<int>(letters.size()); }

  std::string to_string() const {
    std::string out;
    out.reserve(tags.size());
    for (Tag t : tags) out.push_back(letters[static_cast<std::size_t>(t)]);
    return out;
  }
};

// Letters map to tag ids by first occurrence: "ACADBCBD" gives A=0, C=1, D=2, B=3.
inline Pattern parse_pattern(const std::string& spec) {
  if (spec.empty()) throw ConfigError("pattern spec must be non-empty");
  Pattern p;
  p.tags.reserve(spec.size());
  for (char c : spec) {
    if (c < 'A' || c > 'Z')
      throw ConfigError(std::string("pattern letters must be A-Z, got '") + c + "'");
    const auto pos = p.letters.find(c);
    if (pos == std::string::npos) {
      p.tags.push_back(static_cast<Tag>(p.letters.size()));
      p.letters.push_back(c);
    } else {
      p.tags.push_back(static_cast<Tag>(pos));
    }
  }
  return p;
}

// Tag prescribed for 0-based token position p.
inline Tag tag_of_position(std::int64_t p, const Pattern& pattern) {
  if (p < 0) throw ConfigError("token position must be non-negative");
  return pattern.tags[static_cast<std::size_t>(p % pattern.period())];
}

// All distinct length-w slices of the cyclically repeated pattern. For w > R
// the slices wrap, e.g. AB with w=4 gives {ABAB, BABA}.
struct CyclicWindowSet {
  int w = 0;
  std::vector<std::vector<Tag>> windows;  // sorted, deduplicated

  bool contains(std::span<const Tag> window) const {
    for (const auto& candidate : windows) {
      if (std::equal(candidate.begin(), candidate.end(), window.begin(),
                     window.end()))
        return true;
    }
    return false;
  }
};

inline CyclicWindowSet valid_windows(const Pattern& pattern, int w) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  const int R = pattern.period();
  std::set<std::vector<Tag>> unique;
  for (int offset = 0; offset < R; ++offset) {
    std::vector<Tag> window(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i)
      window[static_cast<std::size_t>(i)] =
          pattern.tags[static_cast<std::size_t>((offset + i) % R)];
    unique.insert(std::move(window));
  }
  CyclicWindowSet out;
  out.w = w;
  out.windows.assign(unique.begin(), unique.end());
  return out;
}

// The cyclic tag stream itself: tags of positions 0..length-1.
inline std::vector<Tag> pattern_tag_stream(const Pattern& pattern,
                                           std::size_t length) {
  std::vector<Tag> out(length);
  const std::size_t R = static_cast<std::size_t>(pattern.period());
  for (std::size_t i = 0; i < length; ++i) out[i] = pattern.tags[i % R];
  return out;
}

}  // namespace patmark
