#pragma once

// End-to-end experiment pipeline: generate → edit → calibrate → detect →
// evaluate → bounds → δ sweep. Every artifact is JSON or CSV, every stage
// seed derives from the master seed, and outputs are byte-stable across runs.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "patmark/bounds.hpp"
#include "patmark/config.hpp"
#include "patmark/corpus.hpp"
#include "patmark/detection.hpp"
#include "patmark/edits.hpp"
#include "patmark/errors.hpp"
#include "patmark/evaluation.hpp"
#include "patmark/generation.hpp"
#include "patmark/models.hpp"
#include "patmark/partition.hpp"
#include "patmark/pattern.hpp"

namespace patmark {

// Fixed-format doubles keep CSV output byte-stable and diff-friendly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace detail {

template <typename F>
void parallel_for(std::int64_t n, int threads, F&& body) {
  if (threads <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  const int workers = static_cast<int>(
      std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      try {
        for (std::int64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <typename F>
auto run_stage(const char* stage, F&& fn) {
  const auto prefix = [&](const char* what) {
    return std::string(stage) + ": " + what;
  };
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix(e.what()));
  } catch (const CalibrationError& e) {
    throw CalibrationError(prefix(e.what()));
  } catch (const PlanError& e) {
    throw PlanError(prefix(e.what()));
  } catch (const BoundError& e) {
    throw BoundError(prefix(e.what()));
  } catch (const GenerationError& e) {
    throw GenerationError(prefix(e.what()));
  } catch (const DataError& e) {
    throw DataError(prefix(e.what()));
  }
}

}  // namespace detail

// One corpus of seeded generations; record ids carry the given prefix.
inline std::vector<Record> generate_corpus(const TokenModel& model,
                                           const Pattern& pattern,
                                           const VocabPartition& partition,
                                           GenerationConfig base, int num_texts,
                                           std::uint64_t stage_seed,
                                           const std::string& id_prefix,
                                           int threads) {
  std::vector<Record> records(static_cast<std::size_t>(num_texts));
  detail::parallel_for(num_texts, threads, [&](std::int64_t i) {
    GenerationConfig cfg = base;
    cfg.seed = derive_seed(stage_seed, std::to_string(i));
    Record rec;
    rec.id = id_prefix + std::to_string(i);
    rec.seq = generate_watermarked(model, pattern, partition, cfg);
    records[static_cast<std::size_t>(i)] = std::move(rec);
  });
  return records;
}

inline std::vector<Record> edit_corpus(const std::vector<Record>& corpus,
                                       const EditStageConfig& stage,
                                       const VocabPartition& partition,
                                       std::uint64_t stage_seed, int threads) {
  std::vector<Record> edited(corpus.size());
  detail::parallel_for(static_cast<std::int64_t>(corpus.size()), threads,
                       [&](std::int64_t i) {
    const Record& src = corpus[static_cast<std::size_t>(i)];
    if (!src.seq.tags.empty() &&
        src.seq.tags != tags_of_tokens(src.seq.tokens, partition))
      throw DataError("record '" + src.id +
                      "': stored tags don't match the configured partition "
                      "(key/seed mismatch?)");
    EditPlanParams params;
    params.length = static_cast<std::int64_t>(src.seq.tokens.size());
    params.num_edits = stage.num_edits;
    params.span_min = stage.span_min;
    params.span_max = stage.span_max;
    params.kinds = stage.kinds;
    params.vocab_size = partition.vocab_size;
    params.seed = derive_seed(stage_seed, src.id);
    const EditPlan plan = sample_edit_plan(params);
    EditLog log = apply_edits(src.seq, plan);

    Record rec;
    rec.id = src.id;
    rec.seq.tokens = std::move(log.edited.tokens);
    rec.seq.tags = tags_of_tokens(rec.seq.tokens, partition);
    rec.meta = src.meta;
    attach_edit_meta(rec, plan, log.true_positions);
    edited[static_cast<std::size_t>(i)] = std::move(rec);
  });
  return edited;
}

inline std::vector<Tag> record_tags(const Record& rec,
                                    const VocabPartition& partition) {
  if (!rec.seq.tags.empty()) return rec.seq.tags;
  return tags_of_tokens(rec.seq.tokens, partition);
}

inline std::vector<std::vector<Tag>> corpus_tags(
    const std::vector<Record>& corpus, const VocabPartition& partition) {
  std::vector<std::vector<Tag>> tags;
  tags.reserve(corpus.size());
  for (const auto& rec : corpus) tags.push_back(record_tags(rec, partition));
  return tags;
}

inline std::vector<EvalInstance> eval_instances(
    const std::vector<Record>& edited, const VocabPartition& partition) {
  std::vector<EvalInstance> instances;
  instances.reserve(edited.size());
  for (const auto& rec : edited) {
    EvalInstance inst;
    inst.id = rec.id;
    inst.tags = record_tags(rec, partition);
    inst.has_ground_truth = has_edit_meta(rec);
    if (inst.has_ground_truth) {
      inst.true_positions = true_positions_of(rec);
      const auto [kind, span] = edit_bucket(rec);
      inst.kind = kind;
      inst.span = span;
    }
    instances.push_back(std::move(inst));
  }
  return instances;
}

// Columns: position,tag,score,support,flagged,is_true_edit — the plot data
// behind per-position edit statistic figures.
inline void emit_score_trace(const std::vector<Tag>& tags,
                             const std::vector<std::int64_t>& true_positions,
                             int w, const CyclicWindowSet& windows,
                             double tau_e, std::ostream& os) {
  const auto report = detect_edits(tags, w, windows, tau_e);
  std::vector<char> is_true(tags.size(), 0);
  for (std::int64_t t : true_positions) {
    if (t < 0 || static_cast<std::size_t>(t) >= tags.size())
      throw DataError("true position out of range");
    is_true[static_cast<std::size_t>(t)] = 1;
  }
  std::vector<char> flagged(tags.size(), 0);
  for (std::int64_t t : report.flagged) flagged[static_cast<std::size_t>(t)] = 1;
  os << "position,tag,score,support,flagged,is_true_edit\n";
  for (std::size_t t = 0; t < tags.size(); ++t)
    os << t << ',' << tags[t] << ',' << format_double(report.scores[t])
       << ',' << report.support[t] << ',' << int(flagged[t]) << ','
       << int(is_true[t]) << '\n';
}

// Fig.-5-style accuracy matrix: rows = edit kind, cols = span length.
inline void write_accuracy_matrix(const EvalReport& report,
                                  std::int64_t span_min, std::int64_t span_max,
                                  std::ostream& os) {
  os << "kind";
  for (std::int64_t s = span_min; s <= span_max; ++s) os << ',' << s;
  os << '\n';
  for (const char* kind : {"replace", "insert", "delete"}) {
    os << kind;
    const auto kit = report.by_kind_span.find(kind);
    for (std::int64_t s = span_min; s <= span_max; ++s) {
      os << ',';
      if (kit == report.by_kind_span.end()) continue;
      const auto sit = kit->second.find(s);
      if (sit == kit->second.end()) continue;
      if (const auto acc = sit->second.accuracy())
        os << format_double(*acc);
    }
    os << '\n';
  }
}

inline nlohmann::json eval_report_json(const EvalReport& report) {
  nlohmann::json j;
  if (report.detection_accuracy)
    j["detection_accuracy"] = *report.detection_accuracy;
  if (report.type1_rate) j["type1_rate"] = *report.type1_rate;
  j["true_edit_count"] = report.true_edit_count;
  j["detected_count"] = report.detected_count;
  j["eligible_count"] = report.eligible_count;
  j["false_alarm_count"] = report.false_alarm_count;
  j["records_evaluated"] = report.records_evaluated;
  j["records_skipped"] = report.records_skipped;
  j["tolerance"] = report.tolerance;
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& [kind, spans] : report.by_kind_span)
    for (const auto& [span, stats] : spans) {
      nlohmann::json b{{"kind", kind}, {"span", span}, {"records", stats.records}};
      if (const auto acc = stats.accuracy()) b["accuracy"] = *acc;
      if (const auto t1 = stats.type1()) b["type1_rate"] = *t1;
      buckets.push_back(std::move(b));
    }
  j["buckets"] = std::move(buckets);
  return j;
}

struct PipelineResult {
  double tau_e = 0.0;
  double tau_d = 0.0;
  EvalReport eval;
  double mean_statistic_clean = 0.0;
  double watermarked_fraction_edited = 0.0;
  std::string summary_path;
};

inline PipelineResult run_pipeline(const ExperimentConfig& cfg, int threads = 1,
                                   std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  const auto say = [&](const std::string& line) {
    if (log) *log << line << '\n';
  };

  const Pattern pattern = parse_pattern(cfg.pattern);
  const VocabPartition partition = partition_vocabulary(
      cfg.vocab_size, pattern.tag_count(), cfg.partition_key());
  const auto model = build_model(cfg);
  const int w = cfg.detection.w;
  const CyclicWindowSet windows = valid_windows(pattern, w);
  fs::create_directories(cfg.output_dir);
  const auto path = [&](const char* name) {
    return (fs::path(cfg.output_dir) / name).string();
  };

  // --- generate ---
  const auto corpus = detail::run_stage("gen", [&] {
    return generate_corpus(*model, pattern, partition, cfg.generation,
                           cfg.num_texts, cfg.stage_seed("gen"), "wm-",
                           threads);
  });
  write_corpus_file(corpus, path("corpus.jsonl"));
  say("gen: " + std::to_string(corpus.size()) + " texts");

  GenerationConfig plain = cfg.generation;
  plain.delta = 0.0;
  plain.hard = false;
  const auto unwatermarked = detail::run_stage("gen", [&] {
    return generate_corpus(*model, pattern, partition, plain, cfg.num_texts,
                           cfg.stage_seed("gen-unwatermarked"), "plain-",
                           threads);
  });
  write_corpus_file(unwatermarked, path("unwatermarked.jsonl"));

  // --- edit ---
  const auto edited = detail::run_stage("edit", [&] {
    return edit_corpus(corpus, cfg.edits, partition, cfg.stage_seed("edit"),
                       threads);
  });
  write_corpus_file(edited, path("edited.jsonl"));
  say("edit: " + std::to_string(edited.size()) + " texts");

  // --- calibrate ---
  const auto clean_tags = corpus_tags(corpus, partition);
  const auto plain_tags = corpus_tags(unwatermarked, partition);
  PipelineResult result;
  result.tau_e = detail::run_stage("calibrate", [&] {
    return cfg.detection.tau_e >= 0.0
               ? cfg.detection.tau_e
               : calibrate_edit_threshold(clean_tags, w, windows,
                                          cfg.detection.target_alpha,
                                          cfg.evaluation.tolerance);
  });
  result.tau_d = detail::run_stage("calibrate", [&] {
    return cfg.detection.tau_d >= 0.0
               ? cfg.detection.tau_d
               : calibrate_watermark_threshold(plain_tags, w, windows,
                                               cfg.detection.target_alpha);
  });
  say("calibrate: tau_e=" + format_double(result.tau_e) +
      " tau_d=" + format_double(result.tau_d));

  // --- detect ---
  struct PerText {
    double statistic;
    bool watermarked;
    std::int64_t flags;
  };
  const auto edited_tags = corpus_tags(edited, partition);
  std::vector<PerText> per_text(edited.size());
  double clean_stat_sum = 0.0;
  detail::run_stage("detect", [&] {
    detail::parallel_for(static_cast<std::int64_t>(edited.size()), threads,
                         [&](std::int64_t i) {
      const auto& tags = edited_tags[static_cast<std::size_t>(i)];
      PerText row;
      if (cfg.detection.fast) {
        const auto fast = fast_detect(tags, w, windows, pattern.tag_count());
        row.statistic = fast.statistic;
        const auto report = make_edit_report(fast.edit, w, result.tau_e);
        row.flags = static_cast<std::int64_t>(report.flagged.size());
      } else {
        row.statistic = detect_statistic(tags, w, windows);
        const auto report = detect_edits(tags, w, windows, result.tau_e);
        row.flags = static_cast<std::int64_t>(report.flagged.size());
      }
      row.watermarked = row.statistic >= result.tau_d;
      per_text[static_cast<std::size_t>(i)] = row;
    });
    for (const auto& tags : clean_tags)
      clean_stat_sum += detect_statistic(tags, w, windows);
    return 0;
  });
  result.mean_statistic_clean =
      clean_stat_sum / static_cast<double>(clean_tags.size());
  std::int64_t watermarked_count = 0;
  nlohmann::json detect_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < edited.size(); ++i) {
    watermarked_count += per_text[i].watermarked ? 1 : 0;
    detect_rows.push_back({{"id", edited[i].id},
                           {"statistic", per_text[i].statistic},
                           {"watermarked", per_text[i].watermarked},
                           {"flag_count", per_text[i].flags}});
  }
  result.watermarked_fraction_edited =
      static_cast<double>(watermarked_count) / static_cast<double>(edited.size());
  {
    nlohmann::json j{{"tau_d", result.tau_d},
                     {"tau_e", result.tau_e},
                     {"watermarked_fraction", result.watermarked_fraction_edited},
                     {"mean_statistic_clean", result.mean_statistic_clean},
                     {"records", std::move(detect_rows)}};
    std::ofstream out(path("detect_report.json"));
    out << j.dump(2) << '\n';
  }
  say("detect: watermarked fraction " +
      format_double(result.watermarked_fraction_edited));

  // --- evaluate ---
  result.eval = detail::run_stage("eval", [&] {
    return evaluate_suite(eval_instances(edited, partition), windows,
                          EditDetectorConfig{w, result.tau_e, false},
                          cfg.evaluation.tolerance);
  });
  {
    std::ofstream out(path("eval_report.json"));
    out << eval_report_json(result.eval).dump(2) << '\n';
    std::ofstream matrix(path("accuracy_matrix.csv"));
    write_accuracy_matrix(result.eval, cfg.edits.span_min, cfg.edits.span_max,
                          matrix);
  }
  if (result.eval.detection_accuracy)
    say("eval: accuracy " +
        format_double(*result.eval.detection_accuracy));

  // --- bounds ---
  detail::run_stage("bounds", [&] {
    std::vector<int> sizes;
    for (int k = w; k <= 2 * w - 1; ++k) sizes.push_back(k);
    const auto profile = estimate_alignment(clean_tags, pattern, sizes);
    nlohmann::json j;
    for (const auto& [size, mu] : profile.mu) {
      j["mu"][std::to_string(size)] = mu;
      j["se"][std::to_string(size)] = profile.se.at(size);
    }
    if (profile.mu.count(w)) {
      const double mu1 = profile.mu.at(w);
      j["delta_w"] = delta_w(profile, w);
      if (result.tau_e < mu1) {
        const double fa = false_alarm_bound(profile, w, result.tau_e);
        j["false_alarm_bound"] = fa;
        j["false_alarm_bound_vacuous"] = bound_vacuous(fa);
      } else {
        j["false_alarm_bound"] = "inapplicable";
      }
      if (result.tau_d < mu1) {
        j["watermark_power_bound"] = watermark_power_bound(
            cfg.generation.length, w, mu1, result.tau_d);
      } else {
        j["watermark_power_bound"] = "inapplicable";
      }
    }
    std::ofstream out(path("bounds.json"));
    out << j.dump(2) << '\n';
    return 0;
  });

  // --- delta sweep (detectability vs quality) ---
  detail::run_stage("sweep", [&] {
    std::ofstream out(path("delta_sweep.csv"));
    out << "delta,tau_d,type2_rate,mean_perplexity,mean_adherence\n";
    for (double delta : cfg.sweep_deltas) {
      GenerationConfig g = cfg.generation;
      g.delta = delta;
      g.hard = false;
      const auto sweep_corpus = generate_corpus(
          *model, pattern, partition, g, cfg.num_texts,
          cfg.stage_seed("sweep-" + format_double(delta)), "sweep-",
          threads);
      const double tau_d = calibrate_watermark_threshold(
          plain_tags, w, windows, cfg.detection.target_alpha);
      std::int64_t missed = 0;
      double adherence_sum = 0.0, ppl_sum = 0.0;
      std::vector<double> ppl(sweep_corpus.size());
      detail::parallel_for(static_cast<std::int64_t>(sweep_corpus.size()),
                           threads, [&](std::int64_t i) {
        ppl[static_cast<std::size_t>(i)] = toy_perplexity(
            *model, sweep_corpus[static_cast<std::size_t>(i)].seq);
      });
      for (const auto& rec : sweep_corpus) {
        if (detect_statistic(rec.seq.tags, w, windows) < tau_d) ++missed;
        adherence_sum += adherence_rate(rec.seq, pattern);
      }
      for (double v : ppl) ppl_sum += v;
      out << format_double(delta) << ','
          << format_double(tau_d) << ','
          << format_double(static_cast<double>(missed) /
                                   static_cast<double>(sweep_corpus.size()))
          << ','
          << format_double(ppl_sum /
                                   static_cast<double>(sweep_corpus.size()))
          << ','
          << format_double(adherence_sum /
                                   static_cast<double>(sweep_corpus.size()))
          << '\n';
    }
    return 0;
  });
  say("sweep: " + std::to_string(cfg.sweep_deltas.size()) + " delta values");

  // --- example trace (first edited record) ---
  if (!edited.empty()) {
    std::ofstream out(path("score_trace.csv"));
    emit_score_trace(edited_tags.front(), true_positions_of(edited.front()), w,
                     windows, result.tau_e, out);
  }

  // --- summary ---
  {
    nlohmann::json j;
    j["pattern"] = cfg.pattern;
    j["vocab_size"] = cfg.vocab_size;
    j["w"] = w;
    j["num_texts"] = cfg.num_texts;
    j["length"] = cfg.generation.length;
    j["delta"] = cfg.generation.delta;
    j["hard"] = cfg.generation.hard;
    j["tau_e"] = result.tau_e;
    j["tau_d"] = result.tau_d;
    j["tolerance"] = cfg.evaluation.tolerance;
    j["mean_statistic_clean"] = result.mean_statistic_clean;
    j["watermarked_fraction_edited"] = result.watermarked_fraction_edited;
    j["eval"] = eval_report_json(result.eval);
    j["artifacts"] = {path("corpus.jsonl"),       path("unwatermarked.jsonl"),
                      path("edited.jsonl"),       path("detect_report.json"),
                      path("eval_report.json"),   path("accuracy_matrix.csv"),
                      path("bounds.json"),        path("delta_sweep.csv"),
                      path("score_trace.csv")};
    result.summary_path = path("summary.json");
    std::ofstream out(result.summary_path);
    out << j.dump(2) << '\n';
  }
  return result;
}

}  // namespace patmark
