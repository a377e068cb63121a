#include <catch2/catch_amalgamated.hpp>

#include "patmark/generation.hpp"
#include "patmark/models.hpp"
#include "patmark/partition.hpp"
#include "patmark/pattern.hpp"

#include <cmath>
#include <vector>

using namespace patmark;

namespace {

LogitVector uniform_logits(std::size_t n, double value = 0.7) {
  LogitVector l;
  l.values.assign(n, value);
  return l;
}

}  // namespace

TEST_CASE("delta 0 reproduces the plain softmax", "[generation]") {
  LogitVector l;
  l.values = {0.1, 1.3, -0.4, 2.0};
  const auto probs = perturb_logits(l, [](Token u) { return u < 2; }, 0.0);
  double total = 0.0, max_logit = 2.0;
  std::vector<double> expect(4);
  for (std::size_t u = 0; u < 4; ++u) {
    expect[u] = std::exp(l.values[u] - max_logit);
    total += expect[u];
  }
  for (std::size_t u = 0; u < 4; ++u) {
    expect[u] /= total;
    CHECK(probs[u] == Catch::Approx(expect[u]).epsilon(1e-12));
  }
}

TEST_CASE("uniform logits, target of 2/4, delta ln3 -> 3/8 and 1/8",
          "[generation]") {
  const auto probs = perturb_logits(uniform_logits(4),
                                    [](Token u) { return u < 2; }, std::log(3.0));
  CHECK(probs[0] == Catch::Approx(0.375).epsilon(1e-12));
  CHECK(probs[1] == Catch::Approx(0.375).epsilon(1e-12));
  CHECK(probs[2] == Catch::Approx(0.125).epsilon(1e-12));
  CHECK(probs[3] == Catch::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("hard mode zeroes non-target mass", "[generation]") {
  LogitVector l;
  l.values = {0.5, 1.5, -2.0, 0.0};
  const auto probs = perturb_logits(l, [](Token u) { return u == 1 || u == 3; },
                                    0.0, true);
  CHECK(probs[0] == 0.0);
  CHECK(probs[2] == 0.0);
  const double z = std::exp(1.5) + std::exp(0.0);
  CHECK(probs[1] == Catch::Approx(std::exp(1.5) / z).epsilon(1e-12));
  CHECK(probs[3] == Catch::Approx(std::exp(0.0) / z).epsilon(1e-12));

  CHECK_THROWS_AS(
      perturb_logits(l, [](Token) { return false; }, 0.0, true),
      GenerationError);
}

TEST_CASE("perturbation preserves within-group likelihood ratios",
          "[generation][property]") {
  LogitVector l;
  l.values = {0.3, 1.1, -0.7, 0.9, 2.2, -1.5};
  const auto base = perturb_logits(l, [](Token) { return false; }, 0.0);
  const auto bumped =
      perturb_logits(l, [](Token u) { return u % 2 == 0; }, 3.7);
  // Ratios within the target group and within the complement are unchanged.
  CHECK(bumped[0] / bumped[2] == Catch::Approx(base[0] / base[2]).epsilon(1e-9));
  CHECK(bumped[2] / bumped[4] == Catch::Approx(base[2] / base[4]).epsilon(1e-9));
  CHECK(bumped[1] / bumped[3] == Catch::Approx(base[1] / base[3]).epsilon(1e-9));
  CHECK(bumped[3] / bumped[5] == Catch::Approx(base[3] / base[5]).epsilon(1e-9));
}

TEST_CASE("target mass is monotone in delta", "[generation][property]") {
  LogitVector l;
  l.values = {0.2, -0.5, 1.0, 0.4, -1.2, 0.0, 0.8, -0.3};
  const auto in_target = [](Token u) { return u < 3; };
  double previous = -1.0;
  for (double delta : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const auto probs = perturb_logits(l, in_target, delta);
    const double mass = probs[0] + probs[1] + probs[2];
    CHECK(mass > previous);
    previous = mass;
  }
  CHECK_THROWS_AS(perturb_logits(l, in_target, -0.1), ConfigError);
}

TEST_CASE("hard generation adheres to the pattern exactly", "[generation]") {
  const auto pattern = parse_pattern("AB");
  const auto part = partition_vocabulary(16, 2, 11);
  RandomLogitModel model(16, 1.0, 3);

  GenerationConfig cfg;
  cfg.hard = true;
  cfg.length = 40;
  cfg.seed = 9;
  const auto out = generate_watermarked(model, pattern, part, cfg);
  REQUIRE(out.tokens.size() == 40);
  REQUIRE(out.tags.size() == 40);
  for (std::size_t t = 0; t < out.tags.size(); ++t) {
    CHECK(out.tags[t] == tag_of_position(static_cast<std::int64_t>(t), pattern));
    CHECK(out.tags[t] == tag_of_token(out.tokens[t], part));
  }
  CHECK(adherence_rate(out, pattern) == 1.0);
}

TEST_CASE("generation is deterministic in the seed", "[generation]") {
  const auto pattern = parse_pattern("ACADBCBD");
  const auto part = partition_vocabulary(32, 4, 2);
  RandomLogitModel model(32, 1.0, 5);

  GenerationConfig cfg;
  cfg.delta = 4.0;
  cfg.length = 50;
  cfg.seed = 31337;
  const auto a = generate_watermarked(model, pattern, part, cfg);
  const auto b = generate_watermarked(model, pattern, part, cfg);
  CHECK(a.tokens == b.tokens);
  CHECK(a.tags == b.tags);

  cfg.seed = 31338;
  const auto c = generate_watermarked(model, pattern, part, cfg);
  CHECK(a.tokens != c.tokens);

  cfg.sampling = Sampling::greedy;
  const auto g1 = generate_watermarked(model, pattern, part, cfg);
  const auto g2 = generate_watermarked(model, pattern, part, cfg);
  CHECK(g1.tokens == g2.tokens);
}

TEST_CASE("empirical adherence dominates the closed-form lower bound",
          "[generation][mc]") {
  // Near-uniform model: entropy_scale washes out the logit spread, so the
  // per-token distribution is close to uniform over 64 tokens and the bound
  // computed on exactly-uniform p must sit below the measured rate.
  const auto pattern = parse_pattern("AB");
  const std::int32_t V = 64;
  const auto part = partition_vocabulary(V, 2, 21);
  RandomLogitModel model(V, 50.0, 13);

  const double delta = 4.0;
  GenerationConfig cfg;
  cfg.delta = delta;
  cfg.length = 64;

  double adhered = 0.0;
  const int texts = 1200;
  for (int i = 0; i < texts; ++i) {
    cfg.seed = derive_seed(555, std::to_string(i));
    adhered += adherence_rate(generate_watermarked(model, pattern, part, cfg), pattern);
  }
  const double measured = adhered / texts;

  const std::vector<double> uniform(static_cast<std::size_t>(V), 1.0 / V);
  // token_adherence_lower_bound(4, uniform-64) = 0.9674 (exact arithmetic).
  const double lead = 1.0 / (1.0 + std::exp(-delta));
  const double z = std::tanh(delta / 2.0);
  double s = 0.0;
  for (double p : uniform) s += p / (1.0 + z * p);
  const double bound = lead * s;
  CHECK(bound == Catch::Approx(0.9674412887).epsilon(1e-9));
  CHECK(measured >= bound);
}

TEST_CASE("temperature and top_p stay in the multinomial path", "[generation]") {
  const auto pattern = parse_pattern("AB");
  const auto part = partition_vocabulary(8, 2, 4);
  RandomLogitModel model(8, 1.0, 17);

  GenerationConfig cfg;
  cfg.length = 16;
  cfg.seed = 2;
  cfg.temperature = 0.7;
  cfg.top_p = 0.9;
  const auto out = generate_watermarked(model, pattern, part, cfg);
  CHECK(out.tokens.size() == 16);

  cfg.temperature = 0.0;
  CHECK_THROWS_AS(generate_watermarked(model, pattern, part, cfg), ConfigError);
  cfg.temperature = 1.0;
  cfg.top_p = 0.0;
  CHECK_THROWS_AS(generate_watermarked(model, pattern, part, cfg), ConfigError);
  cfg.top_p = 1.0;
  cfg.length = 0;
  CHECK_THROWS_AS(generate_watermarked(model, pattern, part, cfg), ConfigError);
}

TEST_CASE("prompt tokens are context only", "[generation]") {
  const auto pattern = parse_pattern("AB");
  const auto part = partition_vocabulary(8, 2, 4);
  RandomLogitModel model(8, 1.0, 17);

  GenerationConfig cfg;
  cfg.hard = true;
  cfg.length = 10;
  cfg.seed = 6;
  cfg.prompt = {3, 1, 4};
  const auto out = generate_watermarked(model, pattern, part, cfg);
  REQUIRE(out.tokens.size() == 10);
  // Pattern position 0 applies to the first generated token, not the prompt.
  CHECK(out.tags[0] == tag_of_position(0, pattern));

  cfg.prompt = {99};
  CHECK_THROWS_AS(generate_watermarked(model, pattern, part, cfg), DataError);
}
