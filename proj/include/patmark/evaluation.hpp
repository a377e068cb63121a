#pragma once

// Tolerance-window metrics (Definitions 1 and 2), threshold calibration, and
// corpus-level evaluation. Metrics are computed per text and macro-averaged
// with equal text weight; pooled counts are reported alongside.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patmark/detection.hpp"
#include "patmark/errors.hpp"
#include "patmark/generation.hpp"
#include "patmark/pattern.hpp"

namespace patmark {

namespace detail {

inline void check_positions(const std::vector<std::int64_t>& positions,
                            std::int64_t length, const char* what) {
  for (std::int64_t p : positions)
    if (p < 0 || p >= length)
      throw DataError(std::string(what) + " position " + std::to_string(p) +
                      " outside [0, " + std::to_string(length) + ")");
}

// Definition 1 counts: true positions with some flag within L.
inline std::pair<std::int64_t, std::int64_t> def1_counts(
    std::vector<std::int64_t> true_positions, std::vector<std::int64_t> flagged,
    std::int64_t tolerance) {
  std::sort(flagged.begin(), flagged.end());
  std::int64_t hits = 0;
  for (std::int64_t t : true_positions) {
    const auto it = std::lower_bound(flagged.begin(), flagged.end(), t - tolerance);
    if (it != flagged.end() && *it <= t + tolerance) ++hits;
  }
  return {hits, static_cast<std::int64_t>(true_positions.size())};
}

// Definition 2 counts over all positions of the edited text: eligible means
// min distance to every true edit >= L+1 (all positions when no true edits);
// a false alarm is an eligible position with a flag inside [t-L, t+L].
inline std::pair<std::int64_t, std::int64_t> def2_counts(
    const std::vector<std::int64_t>& true_positions,
    const std::vector<std::int64_t>& flagged, std::int64_t tolerance,
    std::int64_t length) {
  // Difference-array sweeps for "within L of a true edit" / "of a flag".
  std::vector<std::int32_t> near_true(static_cast<std::size_t>(length) + 1, 0);
  std::vector<std::int32_t> near_flag(static_cast<std::size_t>(length) + 1, 0);
  const auto mark = [&](std::vector<std::int32_t>& diff, std::int64_t center) {
    const std::int64_t lo = std::max<std::int64_t>(0, center - tolerance);
    const std::int64_t hi = std::min<std::int64_t>(length - 1, center + tolerance);
    ++diff[static_cast<std::size_t>(lo)];
    --diff[static_cast<std::size_t>(hi) + 1];
  };
  for (std::int64_t p : true_positions) mark(near_true, p);
  for (std::int64_t f : flagged) mark(near_flag, f);

  std::int64_t eligible = 0, alarms = 0;
  std::int32_t true_cover = 0, flag_cover = 0;
  for (std::int64_t t = 0; t < length; ++t) {
    true_cover += near_true[static_cast<std::size_t>(t)];
    flag_cover += near_flag[static_cast<std::size_t>(t)];
    if (true_cover == 0) {
      ++eligible;
      if (flag_cover > 0) ++alarms;
    }
  }
  return {alarms, eligible};
}

}  // namespace detail

// Definition 1: fraction of true edits matched by a flag within L. Absent
// (not 0) when the text carries no true edits.
inline std::optional<double> detection_accuracy(
    const std::vector<std::int64_t>& true_positions,
    const std::vector<std::int64_t>& flagged, std::int64_t tolerance,
    std::int64_t length) {
  if (tolerance < 0) throw ConfigError("tolerance must be >= 0");
  if (length < 0) throw DataError("negative sequence length");
  detail::check_positions(true_positions, length, "true");
  detail::check_positions(flagged, length, "flagged");
  const auto [hits, total] = detail::def1_counts(true_positions, flagged, tolerance);
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Definition 2: fraction of eligible positions whose tolerance window catches
// a flag. Absent when no position is eligible.
inline std::optional<double> type1_error_rate(
    const std::vector<std::int64_t>& true_positions,
    const std::vector<std::int64_t>& flagged, std::int64_t tolerance,
    std::int64_t length) {
  if (tolerance < 0) throw ConfigError("tolerance must be >= 0");
  if (length < 0) throw DataError("negative sequence length");
  detail::check_positions(true_positions, length, "true");
  detail::check_positions(flagged, length, "flagged");
  const auto [alarms, eligible] =
      detail::def2_counts(true_positions, flagged, tolerance, length);
  if (eligible == 0) return std::nullopt;
  return static_cast<double>(alarms) / static_cast<double>(eligible);
}

// Achievable |s|_E values are multiples of 1/w; midpoints avoid vacuous
// strict-inequality artifacts. All candidates are < 1.
inline std::vector<double> edit_threshold_grid(int w) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  std::vector<double> grid;
  for (int k = 0; k < w; ++k) {
    grid.push_back(static_cast<double>(k) / w);
    grid.push_back((static_cast<double>(k) + 0.5) / w);
  }
  return grid;  // ascending by construction
}

// Largest grid threshold whose measured Definition-2 rate on the clean corpus
// (empty true sets: every position eligible) stays within target_alpha.
inline double calibrate_edit_threshold(const std::vector<std::vector<Tag>>& corpus,
                                       int w, const CyclicWindowSet& windows,
                                       double target_alpha,
                                       std::int64_t tolerance) {
  if (target_alpha < 0.0 || target_alpha >= 1.0)
    throw ConfigError("target_alpha must be in [0, 1)");
  if (tolerance < 0) throw ConfigError("tolerance must be >= 0");
  if (corpus.empty()) throw CalibrationError("empty calibration corpus");

  std::vector<EditScores> per_text;
  per_text.reserve(corpus.size());
  for (const auto& tags : corpus) per_text.push_back(edit_statistics(tags, w, windows));

  const auto grid = edit_threshold_grid(w);
  double best = 0.0;
  for (double tau : grid) {
    double rate_sum = 0.0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto report = make_edit_report(per_text[i], w, tau);
      const auto [alarms, eligible] = detail::def2_counts(
          {}, report.flagged, tolerance,
          static_cast<std::int64_t>(corpus[i].size()));
      rate_sum += eligible > 0
                      ? static_cast<double>(alarms) / static_cast<double>(eligible)
                      : 0.0;
    }
    const double rate = rate_sum / static_cast<double>(corpus.size());
    if (rate <= target_alpha) best = tau;  // grid ascends; keep the largest
  }
  return best;
}

// Empirical (1 - target_alpha) quantile of |s|_D over unwatermarked texts.
inline double calibrate_watermark_threshold(
    const std::vector<std::vector<Tag>>& corpus, int w,
    const CyclicWindowSet& windows, double target_alpha) {
  if (target_alpha <= 0.0 || target_alpha > 1.0)
    throw ConfigError("target_alpha must be in (0, 1]");
  if (corpus.empty()) throw CalibrationError("empty calibration corpus");
  const double n = static_cast<double>(corpus.size());
  if (target_alpha * n < 1.0)
    throw CalibrationError("corpus of " + std::to_string(corpus.size()) +
                           " texts cannot resolve alpha " +
                           std::to_string(target_alpha));
  std::vector<double> stats;
  stats.reserve(corpus.size());
  for (const auto& tags : corpus)
    stats.push_back(detect_statistic(tags, w, windows));
  std::sort(stats.begin(), stats.end());
  auto idx = static_cast<std::size_t>((1.0 - target_alpha) * n);
  if (idx >= stats.size()) idx = stats.size() - 1;
  return stats[idx];
}

struct EvalInstance {
  std::string id;
  std::vector<Tag> tags;  // edited text
  std::vector<std::int64_t> true_positions;
  bool has_ground_truth = true;  // false → record skipped
  std::string kind;              // breakdown bucket: edit kind, "mixed", "clean"
  std::int64_t span = 0;         // breakdown bucket; 0 when n/a
};

struct BucketStats {
  std::int64_t records = 0;
  double accuracy_sum = 0.0;
  std::int64_t accuracy_records = 0;
  double type1_sum = 0.0;
  std::int64_t type1_records = 0;

  std::optional<double> accuracy() const {
    if (accuracy_records == 0) return std::nullopt;
    return accuracy_sum / static_cast<double>(accuracy_records);
  }
  std::optional<double> type1() const {
    if (type1_records == 0) return std::nullopt;
    return type1_sum / static_cast<double>(type1_records);
  }
};

struct EvalReport {
  std::optional<double> detection_accuracy;  // macro over texts with true edits
  std::optional<double> type1_rate;          // macro over texts with eligible positions
  std::int64_t true_edit_count = 0;          // pooled
  std::int64_t detected_count = 0;
  std::int64_t eligible_count = 0;
  std::int64_t false_alarm_count = 0;
  std::int64_t records_evaluated = 0;
  std::int64_t records_skipped = 0;
  std::int64_t tolerance = 0;
  std::map<std::string, std::map<std::int64_t, BucketStats>> by_kind_span;
};

struct EditDetectorConfig {
  int w = 2;
  double tau_e = 0.75;
  bool flag_partial_support = false;
};

inline EvalReport evaluate_suite(const std::vector<EvalInstance>& instances,
                                 const CyclicWindowSet& windows,
                                 const EditDetectorConfig& detector,
                                 std::int64_t tolerance) {
  if (tolerance < 0) throw ConfigError("tolerance must be >= 0");
  EvalReport report;
  report.tolerance = tolerance;
  double accuracy_sum = 0.0, type1_sum = 0.0;
  std::int64_t accuracy_records = 0, type1_records = 0;

  for (const auto& inst : instances) {
    if (!inst.has_ground_truth ||
        inst.tags.size() < static_cast<std::size_t>(detector.w)) {
      ++report.records_skipped;
      continue;
    }
    const auto edit_report =
        detect_edits(inst.tags, detector.w, windows, detector.tau_e,
                     detector.flag_partial_support);
    const std::int64_t length = static_cast<std::int64_t>(inst.tags.size());
    detail::check_positions(inst.true_positions, length, "true");
    const auto [hits, total] =
        detail::def1_counts(inst.true_positions, edit_report.flagged, tolerance);
    const auto [alarms, eligible] = detail::def2_counts(
        inst.true_positions, edit_report.flagged, tolerance, length);

    ++report.records_evaluated;
    report.true_edit_count += total;
    report.detected_count += hits;
    report.eligible_count += eligible;
    report.false_alarm_count += alarms;

    auto& bucket = report.by_kind_span[inst.kind][inst.span];
    ++bucket.records;
    if (total > 0) {
      const double acc = static_cast<double>(hits) / static_cast<double>(total);
      accuracy_sum += acc;
      ++accuracy_records;
      bucket.accuracy_sum += acc;
      ++bucket.accuracy_records;
    }
    if (eligible > 0) {
      const double t1 = static_cast<double>(alarms) / static_cast<double>(eligible);
      type1_sum += t1;
      ++type1_records;
      bucket.type1_sum += t1;
      ++bucket.type1_records;
    }
  }
  if (accuracy_records > 0)
    report.detection_accuracy = accuracy_sum / static_cast<double>(accuracy_records);
  if (type1_records > 0)
    report.type1_rate = type1_sum / static_cast<double>(type1_records);
  return report;
}

// exp of the mean negative log-likelihood under the UNWATERMARKED model.
// A zero-probability token makes the value infinite, reported as such.
inline double toy_perplexity(const TokenModel& model, const TokenSequence& seq) {
  if (seq.tokens.empty()) throw DataError("cannot score an empty sequence");
  double total_nll = 0.0;
  std::vector<Token> context;
  context.reserve(seq.tokens.size());
  for (Token token : seq.tokens) {
    if (token < 0 || token >= model.vocab_size())
      throw DataError("token " + std::to_string(token) + " outside vocabulary");
    const auto probs = perturb_logits(model.next_logits(context),
                                      [](Token) { return false; }, 0.0);
    const double p = probs[static_cast<std::size_t>(token)];
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    total_nll += -std::log(p);
    context.push_back(token);
  }
  return std::exp(total_nll / static_cast<double>(seq.tokens.size()));
}

}  // namespace patmark
