#pragma once

// Window indicator, global watermark statistic, and per-token edit statistic,
// each available through a naive path and a rolling-encoding fast path that is
// bit-identical to it.
//
// For a tag sequence of length T and window length w there are N = T - w + 1
// windows. The global statistic is the fraction of matching windows; the edit
// statistic at position t averages the indicators of the (up to w) windows
// covering t. Positions covered by fewer than w windows get a partial-support
// average and are excluded from flagging unless explicitly requested.

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "patmark/errors.hpp"
#include "patmark/pattern.hpp"
#include "patmark/random.hpp"

namespace patmark {

struct DetectionReport {
  double statistic = 0.0;  // match_count / window_count
  double threshold = 0.0;
  bool watermarked = false;
  std::int64_t window_count = 0;  // N = T - w + 1
  std::int64_t match_count = 0;   // M
};

struct EditReport {
  std::vector<double> scores;    // one per token position
  std::vector<int> support;      // covering windows actually averaged
  double threshold = 0.0;
  std::vector<std::int64_t> flagged;  // sorted; support == w and score < threshold
};

inline void check_window_args(std::size_t length, int w) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  if (length < static_cast<std::size_t>(w))
    throw DataError("sequence of length " + std::to_string(length) +
                    " is shorter than window " + std::to_string(w));
}

// 1 iff tags[t .. t+w) is a valid cyclic slice of the pattern.
inline int window_indicator(std::span<const Tag> tags, std::int64_t t, int w,
                            const CyclicWindowSet& windows) {
  if (t < 0 || static_cast<std::size_t>(t) + static_cast<std::size_t>(w) > tags.size())
    throw DataError("window start " + std::to_string(t) + " out of range");
  return windows.contains(tags.subspan(static_cast<std::size_t>(t),
                                       static_cast<std::size_t>(w)))
             ? 1
             : 0;
}

// All window indicators, naive path: each window is compared slice-by-slice.
inline std::vector<std::uint8_t> window_indicators_naive(
    std::span<const Tag> tags, int w, const CyclicWindowSet& windows) {
  check_window_args(tags.size(), w);
  const std::size_t n = tags.size() - static_cast<std::size_t>(w) + 1;
  std::vector<std::uint8_t> ind(n);
  for (std::size_t t = 0; t < n; ++t)
    ind[t] = windows.contains(tags.subspan(t, static_cast<std::size_t>(w))) ? 1 : 0;
  return ind;
}

namespace detail {

struct TagVectorHash {
  std::size_t operator()(const std::vector<Tag>& v) const {
    return static_cast<std::size_t>(fnv1a64(v));
  }
};

// Exact base-r positional encoding fits in 64 bits only for small r^w; the
// fallback set keeps exact equality semantics for everything else.
inline bool rolling_code_fits(std::uint64_t base, int w) {
  std::uint64_t value = 1;
  for (int i = 0; i < w; ++i) {
    if (value > (std::uint64_t{1} << 62) / base) return false;
    value *= base;
  }
  return true;
}

}  // namespace detail

// Fast path: precomputed lookup set over encoded windows, incremental window
// encoding. Produces indicators identical to the naive path on every input.
inline std::vector<std::uint8_t> window_indicators_fast(
    std::span<const Tag> tags, int w, const CyclicWindowSet& windows,
    int tag_count) {
  check_window_args(tags.size(), w);
  const std::size_t n = tags.size() - static_cast<std::size_t>(w) + 1;
  std::vector<std::uint8_t> ind(n);
  const std::uint64_t base =
      static_cast<std::uint64_t>(tag_count < 2 ? 2 : tag_count);

  if (detail::rolling_code_fits(base, w)) {
    std::uint64_t high = 1;  // base^(w-1)
    for (int i = 0; i + 1 < w; ++i) high *= base;

    std::unordered_set<std::uint64_t> lookup;
    lookup.reserve(windows.windows.size() * 2);
    for (const auto& window : windows.windows) {
      std::uint64_t code = 0;
      for (Tag tag : window) code = code * base + static_cast<std::uint64_t>(tag);
      lookup.insert(code);
    }

    std::uint64_t code = 0;
    for (int i = 0; i < w; ++i)
      code = code * base + static_cast<std::uint64_t>(tags[static_cast<std::size_t>(i)]);
    ind[0] = lookup.count(code) ? 1 : 0;
    for (std::size_t t = 1; t < n; ++t) {
      code -= static_cast<std::uint64_t>(tags[t - 1]) * high;
      code = code * base +
             static_cast<std::uint64_t>(tags[t + static_cast<std::size_t>(w) - 1]);
      ind[t] = lookup.count(code) ? 1 : 0;
    }
    return ind;
  }

  // Wide windows: hash set keyed on the tag vectors themselves. Collisions are
  // resolved by the set's element equality, so results stay exact.
  std::unordered_set<std::vector<Tag>, detail::TagVectorHash> lookup(
      windows.windows.begin(), windows.windows.end());
  std::vector<Tag> current(tags.begin(), tags.begin() + w);
  ind[0] = lookup.count(current) ? 1 : 0;
  for (std::size_t t = 1; t < n; ++t) {
    current.erase(current.begin());
    current.push_back(tags[t + static_cast<std::size_t>(w) - 1]);
    ind[t] = lookup.count(current) ? 1 : 0;
  }
  return ind;
}

inline std::int64_t count_matches(const std::vector<std::uint8_t>& indicators) {
  std::int64_t m = 0;
  for (std::uint8_t v : indicators) m += v;
  return m;
}

// Global watermark statistic: mean window indicator.
inline double detect_statistic(std::span<const Tag> tags, int w,
                               const CyclicWindowSet& windows) {
  const auto ind = window_indicators_naive(tags, w, windows);
  return static_cast<double>(count_matches(ind)) / static_cast<double>(ind.size());
}

inline DetectionReport make_detection_report(
    const std::vector<std::uint8_t>& indicators, double tau_d) {
  DetectionReport report;
  report.window_count = static_cast<std::int64_t>(indicators.size());
  report.match_count = count_matches(indicators);
  report.statistic = static_cast<double>(report.match_count) /
                     static_cast<double>(report.window_count);
  report.threshold = tau_d;
  report.watermarked = report.statistic >= tau_d;  // ties resolve to watermarked
  return report;
}

inline DetectionReport detect_watermark(std::span<const Tag> tags, int w,
                                        const CyclicWindowSet& windows,
                                        double tau_d) {
  if (tau_d < 0.0 || tau_d > 1.0)
    throw ConfigError("watermark threshold must be in [0, 1]");
  return make_detection_report(window_indicators_naive(tags, w, windows), tau_d);
}

struct EditScores {
  std::vector<double> scores;
  std::vector<int> support;
};

// Per-token scores from precomputed indicators. Position t is covered by
// windows starting in [t-w+1, t], clipped to the valid start range.
inline EditScores edit_scores_from_indicators(
    const std::vector<std::uint8_t>& indicators, std::size_t length, int w) {
  const std::int64_t n = static_cast<std::int64_t>(indicators.size());
  EditScores out;
  out.scores.resize(length);
  out.support.resize(length);
  std::int64_t running = 0;  // sum of indicators in the covering start range
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(length); ++t) {
    const std::int64_t first = std::max<std::int64_t>(0, t - w + 1);
    const std::int64_t last = std::min<std::int64_t>(t, n - 1);
    if (t <= n - 1) running += indicators[static_cast<std::size_t>(t)];
    if (t - w >= 0) running -= indicators[static_cast<std::size_t>(t - w)];
    const int support = static_cast<int>(last - first + 1);
    out.support[static_cast<std::size_t>(t)] = support;
    out.scores[static_cast<std::size_t>(t)] =
        static_cast<double>(running) / static_cast<double>(support);
  }
  return out;
}

inline EditScores edit_statistics(std::span<const Tag> tags, int w,
                                  const CyclicWindowSet& windows) {
  const auto ind = window_indicators_naive(tags, w, windows);
  return edit_scores_from_indicators(ind, tags.size(), w);
}

inline EditReport make_edit_report(const EditScores& scores, int w, double tau_e,
                                   bool flag_partial_support = false) {
  EditReport report;
  report.scores = scores.scores;
  report.support = scores.support;
  report.threshold = tau_e;
  for (std::size_t t = 0; t < scores.scores.size(); ++t) {
    const bool eligible = flag_partial_support || scores.support[t] == w;
    if (eligible && scores.scores[t] < tau_e)  // strict: tau_e = 0 never fires
      report.flagged.push_back(static_cast<std::int64_t>(t));
  }
  return report;
}

inline EditReport detect_edits(std::span<const Tag> tags, int w,
                               const CyclicWindowSet& windows, double tau_e,
                               bool flag_partial_support = false) {
  if (tau_e < 0.0 || tau_e > 1.0)
    throw ConfigError("edit threshold must be in [0, 1]");
  return make_edit_report(edit_statistics(tags, w, windows), w, tau_e,
                          flag_partial_support);
}

struct FastDetection {
  std::int64_t match_count = 0;
  double statistic = 0.0;
  EditScores edit;
};

// Fast path for both statistics at once; contractually bit-identical to the
// naive pair (detect_statistic, edit_statistics).
inline FastDetection fast_detect(std::span<const Tag> tags, int w,
                                 const CyclicWindowSet& windows, int tag_count) {
  const auto ind = window_indicators_fast(tags, w, windows, tag_count);
  FastDetection out;
  out.match_count = count_matches(ind);
  out.statistic =
      static_cast<double>(out.match_count) / static_cast<double>(ind.size());
  out.edit = edit_scores_from_indicators(ind, tags.size(), w);
  return out;
}

// Even/odd alternation check: 1 iff the pair at (t, t+1) crosses between the
// odd-index and even-index tag groups. With singleton groups this reduces to
// the standard w=2 indicator for an alternating binary pattern.
inline int evenodd_indicator(std::span<const Tag> tags, std::int64_t t,
                             const std::set<Tag>& odd_group,
                             const std::set<Tag>& even_group) {
  for (Tag tag : odd_group)
    if (even_group.count(tag))
      throw ConfigError("even/odd tag groups overlap on tag " + std::to_string(tag));
  if (t < 0 || static_cast<std::size_t>(t) + 2 > tags.size())
    throw DataError("even/odd window start out of range");
  const auto group_of = [&](Tag tag) {
    if (odd_group.count(tag)) return 0;
    if (even_group.count(tag)) return 1;
    throw DataError("tag " + std::to_string(tag) + " belongs to neither group");
  };
  return group_of(tags[static_cast<std::size_t>(t)]) !=
                 group_of(tags[static_cast<std::size_t>(t + 1)])
             ? 1
             : 0;
}

}  // namespace patmark
