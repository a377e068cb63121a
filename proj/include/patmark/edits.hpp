#pragma once

// Post-generation edit simulation: replacement, insertion, deletion over
// token sequences, with ground-truth positions in the edited sequence.
// Plans keep a 1-token buffer between ops so per-edit ground truth stays
// unambiguous under tolerance-window metrics.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "patmark/errors.hpp"
#include "patmark/generation.hpp"
#include "patmark/random.hpp"

namespace patmark {

enum class EditKind { replace, insert, del };

inline std::string to_string(EditKind kind) {
  switch (kind) {
    case EditKind::replace: return "replace";
    case EditKind::insert: return "insert";
    case EditKind::del: return "delete";
  }
  throw ConfigError("unknown edit kind");
}

inline EditKind edit_kind_from_string(const std::string& name) {
  if (name == "replace") return EditKind::replace;
  if (name == "insert") return EditKind::insert;
  if (name == "delete") return EditKind::del;
  throw ConfigError("unknown edit kind '" + name + "'");
}

struct EditOp {
  EditKind kind = EditKind::replace;
  std::int64_t start = 0;  // position in the ORIGINAL sequence; for insert,
                           // the gap before original index `start` (0..T)
  std::int64_t span = 1;
  std::vector<Token> payload;  // replace/insert only, length == span
};

struct EditPlan {
  std::vector<EditOp> ops;  // sorted by start
  std::uint64_t seed = 0;
};

struct EditLog {
  TokenSequence edited;
  std::vector<std::int64_t> true_positions;  // in the EDITED sequence
};

namespace detail {

// Tokens of the original sequence an op occupies; inserts occupy the empty
// gap at their start.
inline std::int64_t footprint(const EditOp& op) {
  return op.kind == EditKind::insert ? 0 : op.span;
}

inline void validate_op(const EditOp& op, std::int64_t length,
                        std::int32_t vocab_size) {
  if (op.span < 1) throw PlanError("edit span must be >= 1");
  if (op.start < 0) throw PlanError("edit start must be >= 0");
  if (op.kind == EditKind::insert) {
    if (op.start > length) throw PlanError("insert start beyond sequence end");
  } else if (op.start + op.span > length) {
    throw PlanError("edit [" + std::to_string(op.start) + ", " +
                    std::to_string(op.start + op.span) + ") exceeds length " +
                    std::to_string(length));
  }
  const bool needs_payload = op.kind != EditKind::del;
  if (needs_payload) {
    if (static_cast<std::int64_t>(op.payload.size()) != op.span)
      throw PlanError("payload length must equal span");
    if (vocab_size > 0)
      for (Token tok : op.payload)
        if (tok < 0 || tok >= vocab_size)
          throw PlanError("payload token " + std::to_string(tok) +
                          " outside vocabulary");
  } else if (!op.payload.empty()) {
    throw PlanError("delete ops carry no payload");
  }
}

}  // namespace detail

// Sorted ops, 1-token buffer between footprints, all within bounds.
inline void validate_plan(const EditPlan& plan, std::int64_t length,
                          std::int32_t vocab_size = 0) {
  std::int64_t previous_end = -1;  // end of previous footprint, exclusive
  bool first = true;
  for (const EditOp& op : plan.ops) {
    detail::validate_op(op, length, vocab_size);
    if (!first && op.start < previous_end + 1)
      throw PlanError("edit ops overlap or touch (1-token buffer required)");
    previous_end = op.start + detail::footprint(op);
    first = false;
  }
}

struct EditPlanParams {
  std::int64_t length = 0;  // original sequence length T
  int num_edits = 1;
  std::int64_t span_min = 1;
  std::int64_t span_max = 6;
  std::vector<EditKind> kinds = {EditKind::replace, EditKind::insert,
                                 EditKind::del};
  std::int32_t vocab_size = 0;
  std::uint64_t seed = 0;
};

// Kinds and spans uniform over the allowed sets, payload tokens uniform over
// the vocabulary, and start positions uniform over ALL feasible non-overlapping
// placements for the drawn footprints (exact, via the stars-and-bars bijection
// between placements and sorted subsets).
inline EditPlan sample_edit_plan(const EditPlanParams& params) {
  if (params.length < 1) throw ConfigError("sequence length must be >= 1");
  if (params.num_edits < 0) throw ConfigError("num_edits must be >= 0");
  if (params.span_min < 1 || params.span_max < params.span_min)
    throw ConfigError("need 1 <= span_min <= span_max");
  if (params.kinds.empty()) throw ConfigError("no edit kinds allowed");
  if (params.vocab_size < 1) throw ConfigError("vocab_size must be >= 1");

  EditPlan plan;
  plan.seed = params.seed;
  if (params.num_edits == 0) return plan;

  Rng rng(derive_seed(params.seed, "edit-plan"));
  const std::size_t k = static_cast<std::size_t>(params.num_edits);
  plan.ops.resize(k);
  std::int64_t total_footprint = 0;
  for (EditOp& op : plan.ops) {
    op.kind = params.kinds[static_cast<std::size_t>(
        rng.next_below(static_cast<std::uint64_t>(params.kinds.size())))];
    op.span = params.span_min +
              static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(
                  params.span_max - params.span_min + 1)));
    if (op.kind != EditKind::del) {
      op.payload.resize(static_cast<std::size_t>(op.span));
      for (Token& tok : op.payload)
        tok = static_cast<Token>(
            rng.next_below(static_cast<std::uint64_t>(params.vocab_size)));
    }
    total_footprint += detail::footprint(op);
  }

  // Free slack once footprints and inter-op buffers are laid down.
  const std::int64_t slack =
      params.length - total_footprint - (static_cast<std::int64_t>(k) - 1);
  if (slack < 0)
    throw PlanError("cannot place " + std::to_string(k) +
                    " non-overlapping edits in length " +
                    std::to_string(params.length));

  // Sorted k-subset of [0, slack + k - 1] maps to non-decreasing gap offsets.
  const auto subset =
      rng.sample_sorted(static_cast<std::uint64_t>(slack + static_cast<std::int64_t>(k)),
                        k);
  std::int64_t laid = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::int64_t offset =
        static_cast<std::int64_t>(subset[i]) - static_cast<std::int64_t>(i);
    plan.ops[i].start = offset + laid;
    laid += detail::footprint(plan.ops[i]) + 1;
  }
  validate_plan(plan, params.length, params.vocab_size);
  return plan;
}

inline EditPlan sample_edit_plan(std::int64_t length, int num_edits,
                                 std::int64_t span_max,
                                 const std::vector<EditKind>& kinds,
                                 std::int32_t vocab_size, std::uint64_t seed) {
  EditPlanParams params;
  params.length = length;
  params.num_edits = num_edits;
  params.span_max = span_max;
  params.kinds = kinds;
  params.vocab_size = vocab_size;
  params.seed = seed;
  return sample_edit_plan(params);
}

// Ground truth: replace/insert mark every payload token's edited index;
// delete marks the junction (first edited index after the removed span,
// clamped to the last position when the suffix was removed).
inline EditLog apply_edits(const TokenSequence& seq, const EditPlan& plan) {
  const std::int64_t length = static_cast<std::int64_t>(seq.tokens.size());
  validate_plan(plan, length);

  EditLog log;
  auto& edited = log.edited.tokens;
  std::vector<std::int64_t> junctions;  // provisional, clamped after the build
  std::int64_t src = 0;
  for (const EditOp& op : plan.ops) {
    edited.insert(edited.end(), seq.tokens.begin() + src,
                  seq.tokens.begin() + op.start);
    switch (op.kind) {
      case EditKind::replace:
      case EditKind::insert:
        for (Token tok : op.payload) {
          edited.push_back(tok);
          log.true_positions.push_back(
              static_cast<std::int64_t>(edited.size()) - 1);
        }
        src = op.kind == EditKind::insert ? op.start : op.start + op.span;
        break;
      case EditKind::del:
        junctions.push_back(static_cast<std::int64_t>(edited.size()));
        src = op.start + op.span;
        break;
    }
  }
  edited.insert(edited.end(), seq.tokens.begin() + src, seq.tokens.end());

  if (edited.empty())
    throw PlanError("plan removes the entire sequence; no ground truth exists");
  for (std::int64_t junction : junctions)
    log.true_positions.push_back(
        std::min(junction, static_cast<std::int64_t>(edited.size()) - 1));
  std::sort(log.true_positions.begin(), log.true_positions.end());
  return log;
}

// Single deletion starting at a position congruent to `offset` mod the
// pattern period, for adversarial alignment stress tests. With no explicit
// length the op lands one period in; otherwise nearest to the middle.
inline EditPlan aligned_deletion_plan(const Pattern& pattern,
                                      std::int64_t offset, std::int64_t span,
                                      std::int64_t length = -1) {
  const std::int64_t period = pattern.period();
  if (offset < 0 || offset >= period)
    throw ConfigError("offset must lie in [0, pattern period)");
  if (span < 1) throw ConfigError("span must be >= 1");

  std::int64_t start = offset + period;
  if (length >= 0) {
    std::int64_t cycles = (length / 2 - offset) / period;
    if (cycles < 1) cycles = 1;
    start = offset + cycles * period;
    while (start - period >= 0 && start + span > length) start -= period;
    if (start < 0 || start + span > length)
      throw PlanError("no aligned placement fits length " +
                      std::to_string(length));
  }

  EditPlan plan;
  EditOp op;
  op.kind = EditKind::del;
  op.start = start;
  op.span = span;
  plan.ops.push_back(op);
  return plan;
}

}  // namespace patmark
