#pragma once

// Synthetic next-token models standing in for a real LM at desk scale. Both
// are deterministic functions of (seed, context), so generation is exactly
// reproducible and models are safe for concurrent reads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "patmark/errors.hpp"
#include "patmark/generation.hpp"
#include "patmark/random.hpp"

namespace patmark {

// Logits are i.i.d. normals scaled by 1/entropy_scale, re-seeded from a hash
// of the context. Larger entropy_scale flattens the softmax toward uniform.
class RandomLogitModel final : public TokenModel {
 public:
  RandomLogitModel(std::int32_t vocab_size, double entropy_scale,
                   std::uint64_t seed)
      : vocab_size_(vocab_size), entropy_scale_(entropy_scale), seed_(seed) {
    if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
    if (!(entropy_scale > 0.0)) throw ConfigError("entropy_scale must be > 0");
  }

  std::int32_t vocab_size() const override { return vocab_size_; }

  LogitVector next_logits(std::span<const Token> context) const override {
    std::vector<Token> ctx(context.begin(), context.end());
    Rng rng(fnv1a64(ctx, derive_seed(seed_, "random-logit-model")));
    LogitVector out;
    out.values.resize(static_cast<std::size_t>(vocab_size_));
    for (double& v : out.values) v = rng.next_normal() / entropy_scale_;
    return out;
  }

 private:
  std::int32_t vocab_size_;
  double entropy_scale_;
  std::uint64_t seed_;
};

// Order-1/2 Markov chain with a seeded random transition table. Rows are
// drawn once at construction (exponential weights, normalized), so logits are
// a pure table lookup on the 0-padded context suffix.
class MarkovModel final : public TokenModel {
 public:
  MarkovModel(std::int32_t vocab_size, int order, std::uint64_t seed)
      : vocab_size_(vocab_size), order_(order) {
    if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
    if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
    const std::size_t v = static_cast<std::size_t>(vocab_size);
    const std::size_t rows = order == 1 ? v : v * v;
    table_.resize(rows * v);
    Rng rng(derive_seed(seed, "markov-model"));
    for (std::size_t row = 0; row < rows; ++row) {
      double total = 0.0;
      for (std::size_t col = 0; col < v; ++col) {
        // Exp(1) weights: normalizing gives a flat Dirichlet row. Clamp keeps
        // every probability positive so log-logits stay finite.
        const double weight =
            std::max(-std::log(1.0 - rng.next_unit()), 1e-12);
        table_[row * v + col] = weight;
        total += weight;
      }
      for (std::size_t col = 0; col < v; ++col) table_[row * v + col] /= total;
    }
  }

  std::int32_t vocab_size() const override { return vocab_size_; }

  // Probability row for the 0-padded suffix of the context.
  std::span<const double> transition_row(std::span<const Token> context) const {
    const std::size_t v = static_cast<std::size_t>(vocab_size_);
    std::size_t row = 0;
    for (int i = order_; i >= 1; --i) {
      const std::int64_t idx = static_cast<std::int64_t>(context.size()) - i;
      Token tok = idx >= 0 ? context[static_cast<std::size_t>(idx)] : 0;
      if (tok < 0 || tok >= vocab_size_)
        throw DataError("context token " + std::to_string(tok) + " out of vocab");
      row = row * v + static_cast<std::size_t>(tok);
    }
    return std::span<const double>(table_.data() + row * v, v);
  }

  LogitVector next_logits(std::span<const Token> context) const override {
    const auto row = transition_row(context);
    LogitVector out;
    out.values.resize(row.size());
    for (std::size_t u = 0; u < row.size(); ++u)
      out.values[u] = std::log(row[u]);
    return out;
  }

 private:
  std::int32_t vocab_size_;
  int order_;
  std::vector<double> table_;  // rows x vocab, row-major probabilities
};

inline std::unique_ptr<TokenModel> make_random_logit_model(
    std::int32_t vocab_size, double entropy_scale, std::uint64_t seed) {
  return std::make_unique<RandomLogitModel>(vocab_size, entropy_scale, seed);
}

inline std::unique_ptr<TokenModel> make_markov_model(std::int32_t vocab_size,
                                                     int order,
                                                     std::uint64_t seed) {
  return std::make_unique<MarkovModel>(vocab_size, order, seed);
}

}  // namespace patmark
