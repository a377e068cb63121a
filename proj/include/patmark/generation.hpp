#pragma once

// Next-token model interface and watermarked generation. Each step adds delta
// to the logits of the current pattern tag's vocabulary subset and samples
// from the resulting distribution; hard mode restricts the sampling support to
// the subset instead, guaranteeing exact pattern adherence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "patmark/errors.hpp"
#include "patmark/partition.hpp"
#include "patmark/pattern.hpp"
#include "patmark/random.hpp"

namespace patmark {

using Token = std::int32_t;

struct LogitVector {
  std::vector<double> values;
};

// Deterministic given context; all stochasticity lives in seeded sampling.
class TokenModel {
 public:
  virtual ~TokenModel() = default;
  virtual std::int32_t vocab_size() const = 0;
  virtual LogitVector next_logits(std::span<const Token> context) const = 0;
};

enum class Sampling { greedy, multinomial };

struct GenerationConfig {
  double delta = 5.8;
  bool hard = false;  // restrict support to the target subset; ignores delta
  std::int64_t length = 64;
  Sampling sampling = Sampling::multinomial;
  double temperature = 1.0;  // multinomial only
  double top_p = 1.0;        // multinomial only, applied after perturbation
  std::uint64_t seed = 0;
  std::vector<Token> prompt;  // context only; pattern position 0 is the first
                              // generated token
};

struct TokenSequence {
  std::vector<Token> tokens;
  std::vector<Tag> tags;  // parallel to tokens when non-empty
  std::map<std::string, std::string> meta;
};

// Eq. 2: p̃_u ∝ exp(l_u + δ·1[u ∈ target]). Hard mode zeroes non-target mass
// and renormalizes over the subset (the δ→∞ limit).
template <typename Pred>
std::vector<double> perturb_logits(const LogitVector& logits, Pred&& in_target,
                                   double delta, bool hard = false) {
  if (delta < 0.0) throw ConfigError("delta must be >= 0");
  const auto& l = logits.values;
  if (l.empty()) throw DataError("empty logit vector");
  for (double v : l)
    if (!std::isfinite(v)) throw DataError("non-finite logit value");

  std::vector<char> target(l.size());
  bool any_target = false;
  for (std::size_t u = 0; u < l.size(); ++u) {
    target[u] = in_target(static_cast<Token>(u)) ? 1 : 0;
    any_target |= target[u] != 0;
  }
  if (hard && !any_target)
    throw GenerationError("hard watermarking impossible: target subset is empty");

  std::vector<double> probs(l.size(), 0.0);
  double max_shifted = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < l.size(); ++u) {
    if (hard && !target[u]) continue;
    const double shifted = l[u] + (target[u] && !hard ? delta : 0.0);
    max_shifted = std::max(max_shifted, shifted);
  }
  double total = 0.0;
  for (std::size_t u = 0; u < l.size(); ++u) {
    if (hard && !target[u]) continue;
    const double shifted = l[u] + (target[u] && !hard ? delta : 0.0);
    probs[u] = std::exp(shifted - max_shifted);
    total += probs[u];
  }
  for (double& p : probs) p /= total;
  return probs;
}

namespace detail {

inline std::size_t greedy_pick(const std::vector<double>& probs) {
  std::size_t best = 0;
  for (std::size_t u = 1; u < probs.size(); ++u)
    if (probs[u] > probs[best]) best = u;  // first max wins ties
  return best;
}

// Nucleus truncation: keep the smallest probability-descending prefix whose
// mass reaches top_p, renormalize in place. Ties broken by token id.
inline void truncate_top_p(std::vector<double>& probs, double top_p) {
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  double mass = 0.0;
  std::size_t kept = probs.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    mass += probs[order[i]];
    if (mass >= top_p) {
      kept = i + 1;
      break;
    }
  }
  std::vector<char> keep(probs.size(), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < kept; ++i) {
    keep[order[i]] = 1;
    total += probs[order[i]];
  }
  for (std::size_t u = 0; u < probs.size(); ++u)
    probs[u] = keep[u] ? probs[u] / total : 0.0;
}

inline std::size_t multinomial_pick(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.next_unit();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;  // rounding left acc slightly below 1
}

}  // namespace detail

// Algorithm 1: autoregressive loop; at step t the target subset is the one
// tagged pattern[t mod R].
inline TokenSequence generate_watermarked(const TokenModel& model,
                                          const Pattern& pattern,
                                          const VocabPartition& partition,
                                          const GenerationConfig& cfg) {
  if (model.vocab_size() != partition.vocab_size)
    throw ConfigError("model and partition disagree on vocab_size");
  if (cfg.length < 1) throw ConfigError("generation length must be >= 1");
  if (cfg.delta < 0.0) throw ConfigError("delta must be >= 0");
  if (cfg.temperature <= 0.0) throw ConfigError("temperature must be > 0");
  if (cfg.top_p <= 0.0 || cfg.top_p > 1.0)
    throw ConfigError("top_p must be in (0, 1]");
  for (Token tok : cfg.prompt)
    if (tok < 0 || tok >= model.vocab_size())
      throw DataError("prompt token " + std::to_string(tok) + " out of vocab");

  Rng rng(derive_seed(cfg.seed, "generation"));
  std::vector<Token> context(cfg.prompt);
  context.reserve(cfg.prompt.size() + static_cast<std::size_t>(cfg.length));

  TokenSequence out;
  out.tokens.reserve(static_cast<std::size_t>(cfg.length));
  out.tags.reserve(static_cast<std::size_t>(cfg.length));

  for (std::int64_t t = 0; t < cfg.length; ++t) {
    const Tag tag = tag_of_position(t, pattern);
    LogitVector logits = model.next_logits(context);
    if (static_cast<std::int32_t>(logits.values.size()) != model.vocab_size())
      throw DataError("model emitted logit vector of wrong size");
    if (cfg.sampling == Sampling::multinomial && cfg.temperature != 1.0)
      for (double& v : logits.values) v /= cfg.temperature;

    auto probs = perturb_logits(
        logits, [&](Token u) { return partition.assignment[static_cast<std::size_t>(u)] == tag; },
        cfg.delta, cfg.hard);

    std::size_t pick;
    if (cfg.sampling == Sampling::greedy) {
      pick = detail::greedy_pick(probs);
    } else {
      if (cfg.top_p < 1.0) detail::truncate_top_p(probs, cfg.top_p);
      pick = detail::multinomial_pick(probs, rng);
    }

    const Token token = static_cast<Token>(pick);
    out.tokens.push_back(token);
    out.tags.push_back(partition.assignment[pick]);
    context.push_back(token);
  }
  return out;
}

// Fraction of positions whose realized tag equals the pattern tag. Hard mode
// generation yields exactly 1.
inline double adherence_rate(const TokenSequence& seq, const Pattern& pattern) {
  if (seq.tags.empty()) throw DataError("sequence carries no tags");
  std::int64_t hits = 0;
  for (std::size_t p = 0; p < seq.tags.size(); ++p)
    if (seq.tags[p] == tag_of_position(static_cast<std::int64_t>(p), pattern)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(seq.tags.size());
}

}  // namespace patmark
