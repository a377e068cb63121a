#pragma once

// Experiment configuration: one JSON file driving the whole pipeline. Every
// stochastic stage derives its seed from the master seed plus a stage label,
// so reruns and stage-by-stage reruns agree exactly.

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "patmark/edits.hpp"
#include "patmark/errors.hpp"
#include "patmark/generation.hpp"
#include "patmark/models.hpp"
#include "patmark/random.hpp"

namespace patmark {

struct ModelConfig {
  std::string type = "random_logit";  // or "markov"
  double entropy_scale = 8.0;         // random_logit
  int order = 1;                      // markov
};

struct EditStageConfig {
  int num_edits = 1;
  std::int64_t span_min = 1;
  std::int64_t span_max = 6;
  std::vector<EditKind> kinds = {EditKind::replace, EditKind::insert,
                                 EditKind::del};
};

struct DetectionConfig {
  int w = 2;
  double tau_e = -1.0;  // < 0 → calibrate at target_alpha
  double tau_d = -1.0;  // < 0 → calibrate at target_alpha
  double target_alpha = 0.1;
  bool fast = true;
};

struct EvaluationConfig {
  std::int64_t tolerance = 3;
  double target_alpha = 0.1;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string pattern = "AB";
  std::int32_t vocab_size = 64;
  std::uint64_t key = 0;
  bool key_set = false;  // absent key derives from the master seed
  ModelConfig model;
  GenerationConfig generation;  // seed/prompt fields managed by the pipeline
  int num_texts = 1000;
  EditStageConfig edits;
  DetectionConfig detection;
  EvaluationConfig evaluation;
  std::vector<double> sweep_deltas = {3.0, 4.5, 5.8, 7.0};
  std::string output_dir = "out";

  std::uint64_t partition_key() const {
    return key_set ? key : derive_seed(seed, "watermark-key");
  }
  std::uint64_t stage_seed(const std::string& stage) const {
    return derive_seed(seed, stage);
  }
};

// Unsigned 64-bit, given as a JSON number or a decimal/0x-hex string.
inline std::uint64_t parse_key(const nlohmann::json& value) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v < 0) throw ConfigError("key must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    try {
      std::size_t used = 0;
      const int base = s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0 ? 16 : 10;
      const std::uint64_t parsed = std::stoull(s, &used, base);
      if (used != s.size()) throw ConfigError("trailing characters in key");
      return parsed;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("cannot parse key '" + s + "'");
    }
  }
  throw ConfigError("key must be an unsigned integer or string");
}

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* name, T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad field '" + std::string(name) + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  detail::read_field(j, "seed", cfg.seed);
  detail::read_field(j, "output_dir", cfg.output_dir);
  detail::read_field(j, "num_texts", cfg.num_texts);
  detail::read_field(j, "sweep_deltas", cfg.sweep_deltas);

  if (j.contains("watermark")) {
    const auto& wm = j.at("watermark");
    detail::read_field(wm, "pattern", cfg.pattern);
    detail::read_field(wm, "vocab_size", cfg.vocab_size);
    if (wm.contains("key")) {
      cfg.key = parse_key(wm.at("key"));
      cfg.key_set = true;
    }
  }

  if (j.contains("model")) {
    const auto& m = j.at("model");
    detail::read_field(m, "type", cfg.model.type);
    detail::read_field(m, "entropy_scale", cfg.model.entropy_scale);
    detail::read_field(m, "order", cfg.model.order);
    if (cfg.model.type != "random_logit" && cfg.model.type != "markov")
      throw ConfigError("model type must be 'random_logit' or 'markov'");
  }

  if (j.contains("generation")) {
    const auto& g = j.at("generation");
    detail::read_field(g, "delta", cfg.generation.delta);
    detail::read_field(g, "hard", cfg.generation.hard);
    detail::read_field(g, "length", cfg.generation.length);
    detail::read_field(g, "temperature", cfg.generation.temperature);
    detail::read_field(g, "top_p", cfg.generation.top_p);
    detail::read_field(g, "prompt", cfg.generation.prompt);
    if (g.contains("sampling")) {
      const auto s = g.at("sampling").get<std::string>();
      if (s == "greedy")
        cfg.generation.sampling = Sampling::greedy;
      else if (s == "multinomial")
        cfg.generation.sampling = Sampling::multinomial;
      else
        throw ConfigError("sampling must be 'greedy' or 'multinomial'");
    }
  }

  if (j.contains("edits")) {
    const auto& e = j.at("edits");
    detail::read_field(e, "num_edits", cfg.edits.num_edits);
    detail::read_field(e, "span_min", cfg.edits.span_min);
    detail::read_field(e, "span_max", cfg.edits.span_max);
    if (e.contains("kinds")) {
      cfg.edits.kinds.clear();
      for (const auto& k : e.at("kinds"))
        cfg.edits.kinds.push_back(edit_kind_from_string(k.get<std::string>()));
      if (cfg.edits.kinds.empty()) throw ConfigError("empty edit kinds list");
    }
  }

  if (j.contains("detection")) {
    const auto& d = j.at("detection");
    detail::read_field(d, "w", cfg.detection.w);
    detail::read_field(d, "tau_e", cfg.detection.tau_e);
    detail::read_field(d, "tau_d", cfg.detection.tau_d);
    detail::read_field(d, "target_alpha", cfg.detection.target_alpha);
    detail::read_field(d, "fast", cfg.detection.fast);
  }

  if (j.contains("evaluation")) {
    const auto& e = j.at("evaluation");
    detail::read_field(e, "tolerance", cfg.evaluation.tolerance);
    detail::read_field(e, "target_alpha", cfg.evaluation.target_alpha);
  }

  if (cfg.num_texts < 1) throw ConfigError("num_texts must be >= 1");
  if (cfg.detection.w < 1) throw ConfigError("detection.w must be >= 1");
  if (cfg.evaluation.tolerance < 0)
    throw ConfigError("evaluation.tolerance must be >= 0");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

inline std::unique_ptr<TokenModel> build_model(const ExperimentConfig& cfg) {
  const std::uint64_t seed = cfg.stage_seed("model");
  if (cfg.model.type == "markov")
    return std::make_unique<MarkovModel>(cfg.vocab_size, cfg.model.order, seed);
  return std::make_unique<RandomLogitModel>(cfg.vocab_size,
                                            cfg.model.entropy_scale, seed);
}

}  // namespace patmark
