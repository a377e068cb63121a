// Command-line front end: gen, edit, detect, eval, bounds, run, calibrate.
// Exit codes: 0 success, 2 config error, 3 data error, 4 calibration failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patmark/patmark.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool quiet = false;
};

patmark::ExperimentConfig effective_config(const GlobalOpts& global) {
  patmark::ExperimentConfig cfg;
  if (!global.config_path.empty()) cfg = patmark::load_config(global.config_path);
  if (global.seed) cfg.seed = *global.seed;
  return cfg;
}

struct WatermarkSetup {
  patmark::Pattern pattern;
  patmark::VocabPartition partition;
};

WatermarkSetup watermark_setup(const patmark::ExperimentConfig& cfg) {
  WatermarkSetup setup{patmark::parse_pattern(cfg.pattern), {}};
  setup.partition = patmark::partition_vocabulary(
      cfg.vocab_size, setup.pattern.tag_count(), cfg.partition_key());
  return setup;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw patmark::DataError("cannot open '" + path + "' for writing");
  out << body;
}

std::vector<double> read_probability_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw patmark::DataError("cannot open probability file '" + path + "'");
  std::vector<double> p;
  double v;
  while (in >> v) p.push_back(v);
  if (p.empty()) throw patmark::DataError("probability file is empty");
  return p;
}

// CSV rows "w,mu", optional header.
patmark::AlignmentProfile read_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw patmark::DataError("cannot open profile file '" + path + "'");
  patmark::AlignmentProfile profile;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string w_field, mu_field;
    if (!std::getline(row, w_field, ',') || !std::getline(row, mu_field))
      throw patmark::DataError("profile line " + std::to_string(line_number) +
                               ": expected 'w,mu'");
    if (line_number == 1 && w_field == "w") continue;
    try {
      profile.mu[std::stoi(w_field)] = std::stod(mu_field);
    } catch (const std::exception&) {
      throw patmark::DataError("profile line " + std::to_string(line_number) +
                               ": cannot parse '" + line + "'");
    }
  }
  if (profile.mu.empty()) throw patmark::DataError("profile file has no rows");
  return profile;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combinatorial pattern watermarking toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts global;
  app.add_option("--config", global.config_path, "experiment config JSON file");
  app.add_option("--seed", global.seed, "master seed override");
  app.add_option("--threads", global.threads, "worker threads for batch stages")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", global.quiet, "suppress progress output");

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a watermarked corpus");
  struct {
    std::string output, partition_csv;
    std::optional<int> num_texts;
    std::optional<std::int64_t> length;
    std::optional<double> delta, temperature, top_p, entropy_scale;
    bool hard = false;
    std::optional<std::string> pattern, sampling, model;
    std::optional<std::int32_t> vocab_size;
    std::optional<std::string> key;
    std::optional<int> order;
  } gen_opts;
  gen->add_option("--output", gen_opts.output, "corpus JSONL path")->required();
  gen->add_option("--num-texts", gen_opts.num_texts);
  gen->add_option("--length", gen_opts.length);
  gen->add_option("--delta", gen_opts.delta);
  gen->add_flag("--hard", gen_opts.hard, "restrict sampling to the target subset");
  gen->add_option("--pattern", gen_opts.pattern);
  gen->add_option("--vocab-size", gen_opts.vocab_size);
  gen->add_option("--key", gen_opts.key, "watermark key (decimal or 0x-hex)");
  gen->add_option("--model", gen_opts.model, "random_logit or markov");
  gen->add_option("--entropy-scale", gen_opts.entropy_scale);
  gen->add_option("--order", gen_opts.order, "markov order (1 or 2)");
  gen->add_option("--sampling", gen_opts.sampling, "greedy or multinomial");
  gen->add_option("--temperature", gen_opts.temperature);
  gen->add_option("--top-p", gen_opts.top_p);
  gen->add_option("--export-partition", gen_opts.partition_csv,
                  "write token-id,tag-letter CSV");
  gen->callback([&] {
    auto cfg = effective_config(global);
    if (gen_opts.num_texts) cfg.num_texts = *gen_opts.num_texts;
    if (gen_opts.length) cfg.generation.length = *gen_opts.length;
    if (gen_opts.delta) cfg.generation.delta = *gen_opts.delta;
    if (gen_opts.hard) cfg.generation.hard = true;
    if (gen_opts.pattern) cfg.pattern = *gen_opts.pattern;
    if (gen_opts.vocab_size) cfg.vocab_size = *gen_opts.vocab_size;
    if (gen_opts.key) {
      cfg.key = patmark::parse_key(nlohmann::json(*gen_opts.key));
      cfg.key_set = true;
    }
    if (gen_opts.model) cfg.model.type = *gen_opts.model;
    if (gen_opts.entropy_scale) cfg.model.entropy_scale = *gen_opts.entropy_scale;
    if (gen_opts.order) cfg.model.order = *gen_opts.order;
    if (gen_opts.temperature) cfg.generation.temperature = *gen_opts.temperature;
    if (gen_opts.top_p) cfg.generation.top_p = *gen_opts.top_p;
    if (gen_opts.sampling) {
      if (*gen_opts.sampling == "greedy")
        cfg.generation.sampling = patmark::Sampling::greedy;
      else if (*gen_opts.sampling == "multinomial")
        cfg.generation.sampling = patmark::Sampling::multinomial;
      else
        throw patmark::ConfigError("unknown sampling mode");
    }
    if (cfg.model.type != "random_logit" && cfg.model.type != "markov")
      throw patmark::ConfigError("model type must be 'random_logit' or 'markov'");

    const auto setup = watermark_setup(cfg);
    const auto model = patmark::build_model(cfg);
    const auto corpus = patmark::generate_corpus(
        *model, setup.pattern, setup.partition, cfg.generation, cfg.num_texts,
        cfg.stage_seed("gen"), "wm-", global.threads);
    patmark::write_corpus_file(corpus, gen_opts.output);
    if (!gen_opts.partition_csv.empty()) {
      std::ofstream out(gen_opts.partition_csv);
      patmark::export_partition_csv(setup.partition, setup.pattern, out);
    }
    if (!global.quiet)
      std::cout << "wrote " << corpus.size() << " texts to " << gen_opts.output
                << '\n';
  });

  // ---- edit ----
  auto* edit = app.add_subcommand("edit", "apply seeded edits to a corpus");
  struct {
    std::string input, output;
    std::vector<std::string> kinds;
    std::int64_t span_min = 1, span_max = 6;
    int num_edits = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> pattern;
    std::optional<std::int32_t> vocab_size;
    std::optional<std::string> key;
  } edit_opts;
  edit->add_option("--input", edit_opts.input, "corpus JSONL")->required();
  edit->add_option("--output", edit_opts.output, "edited corpus JSONL")->required();
  edit->add_option("--kinds", edit_opts.kinds,
                   "subset of replace/insert/delete");
  edit->add_option("--span-min", edit_opts.span_min);
  edit->add_option("--span-max", edit_opts.span_max);
  edit->add_option("--num-edits", edit_opts.num_edits);
  edit->add_option("--seed", edit_opts.seed, "edit-stage seed");
  edit->add_option("--pattern", edit_opts.pattern);
  edit->add_option("--vocab-size", edit_opts.vocab_size);
  edit->add_option("--key", edit_opts.key);
  edit->callback([&] {
    auto cfg = effective_config(global);
    if (edit_opts.pattern) cfg.pattern = *edit_opts.pattern;
    if (edit_opts.vocab_size) cfg.vocab_size = *edit_opts.vocab_size;
    if (edit_opts.key) {
      cfg.key = patmark::parse_key(nlohmann::json(*edit_opts.key));
      cfg.key_set = true;
    }
    cfg.edits.num_edits = edit_opts.num_edits;
    cfg.edits.span_min = edit_opts.span_min;
    cfg.edits.span_max = edit_opts.span_max;
    if (!edit_opts.kinds.empty()) {
      cfg.edits.kinds.clear();
      for (const auto& name : edit_opts.kinds)
        cfg.edits.kinds.push_back(patmark::edit_kind_from_string(name));
    }
    const auto setup = watermark_setup(cfg);
    const auto corpus = patmark::read_corpus_file(edit_opts.input);
    const std::uint64_t stage_seed =
        edit_opts.seed ? *edit_opts.seed : cfg.stage_seed("edit");
    const auto edited = patmark::edit_corpus(corpus, cfg.edits, setup.partition,
                                             stage_seed, global.threads);
    patmark::write_corpus_file(edited, edit_opts.output);
    if (!global.quiet)
      std::cout << "wrote " << edited.size() << " edited texts to "
                << edit_opts.output << '\n';
  });

  // ---- detect ----
  auto* detect = app.add_subcommand("detect", "watermark + edit detection");
  struct {
    std::string input, report, emit_scores;
    std::string pattern = "AB";
    int window = 2;
    double tau_d = 0.5, tau_e = 0.75;
    bool fast = true;
  } det_opts;
  detect->add_option("--input", det_opts.input, "corpus JSONL")->required();
  detect->add_option("--pattern", det_opts.pattern);
  detect->add_option("--window", det_opts.window)->check(CLI::PositiveNumber);
  detect->add_option("--tau-d", det_opts.tau_d);
  detect->add_option("--tau-e", det_opts.tau_e);
  detect->add_option("--report", det_opts.report, "JSON report path");
  detect->add_flag("--fast,!--naive", det_opts.fast,
                   "rolling-encoding fast path (default) or naive");
  detect->add_option("--emit-scores", det_opts.emit_scores,
                     "per-token CSV: position,score,support,flagged");
  detect->callback([&] {
    auto cfg = effective_config(global);
    cfg.pattern = det_opts.pattern;
    const auto pattern = patmark::parse_pattern(cfg.pattern);
    const auto windows = patmark::valid_windows(pattern, det_opts.window);
    const auto corpus = patmark::read_corpus_file(det_opts.input);
    if (corpus.empty()) throw patmark::DataError("empty corpus");

    // Records without explicit tags fall back to the configured partition.
    std::optional<WatermarkSetup> setup;
    const auto tags_of = [&](const patmark::Record& rec) {
      if (!rec.seq.tags.empty()) return rec.seq.tags;
      if (!setup) setup = watermark_setup(cfg);
      return patmark::tags_of_tokens(rec.seq.tokens, setup->partition);
    };

    std::ostringstream scores_csv;
    scores_csv << "position,score,support,flagged\n";
    nlohmann::json rows = nlohmann::json::array();
    double stat_sum = 0.0;
    std::int64_t watermarked_count = 0;
    for (const auto& rec : corpus) {
      const auto tags = tags_of(rec);
      patmark::DetectionReport report;
      patmark::EditReport edits;
      if (det_opts.fast) {
        const auto fast = patmark::fast_detect(tags, det_opts.window, windows,
                                               pattern.tag_count());
        report.window_count = static_cast<std::int64_t>(tags.size()) -
                              det_opts.window + 1;
        report.match_count = fast.match_count;
        report.statistic = fast.statistic;
        report.threshold = det_opts.tau_d;
        report.watermarked = fast.statistic >= det_opts.tau_d;
        edits = patmark::make_edit_report(fast.edit, det_opts.window,
                                          det_opts.tau_e);
      } else {
        report = patmark::detect_watermark(tags, det_opts.window, windows,
                                           det_opts.tau_d);
        edits = patmark::detect_edits(tags, det_opts.window, windows,
                                      det_opts.tau_e);
      }
      stat_sum += report.statistic;
      watermarked_count += report.watermarked ? 1 : 0;
      rows.push_back({{"id", rec.id},
                      {"statistic", report.statistic},
                      {"match_count", report.match_count},
                      {"window_count", report.window_count},
                      {"watermarked", report.watermarked},
                      {"flagged", edits.flagged}});
      if (!det_opts.emit_scores.empty()) {
        std::vector<char> flag(tags.size(), 0);
        for (std::int64_t t : edits.flagged)
          flag[static_cast<std::size_t>(t)] = 1;
        for (std::size_t t = 0; t < tags.size(); ++t)
          scores_csv << t << ','
                     << patmark::format_double(edits.scores[t]) << ','
                     << edits.support[t] << ',' << int(flag[t]) << '\n';
      }
    }
    nlohmann::json j{{"tau_d", det_opts.tau_d},
                     {"tau_e", det_opts.tau_e},
                     {"window", det_opts.window},
                     {"pattern", cfg.pattern},
                     {"mean_statistic",
                      stat_sum / static_cast<double>(corpus.size())},
                     {"watermarked_fraction",
                      static_cast<double>(watermarked_count) /
                          static_cast<double>(corpus.size())},
                     {"records", std::move(rows)}};
    if (!det_opts.report.empty())
      write_text_file(det_opts.report, j.dump(2) + "\n");
    if (!det_opts.emit_scores.empty())
      write_text_file(det_opts.emit_scores, scores_csv.str());
    if (!global.quiet)
      std::cout << "watermarked " << watermarked_count << "/" << corpus.size()
                << " (mean statistic "
                << patmark::format_double(
                       stat_sum / static_cast<double>(corpus.size()))
                << ")\n";
  });

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "tolerance-window metrics");
  struct {
    std::string edited, clean, report, matrix;
    std::string pattern = "AB";
    int window = 2;
    double target_alpha = 0.1;
    std::int64_t tolerance = 3;
    std::optional<double> tau_e;
  } eval_opts;
  eval->add_option("--edited", eval_opts.edited, "edited corpus with ground truth")
      ->required();
  eval->add_option("--clean", eval_opts.clean,
                   "clean watermarked corpus for calibration");
  eval->add_option("--pattern", eval_opts.pattern);
  eval->add_option("--window", eval_opts.window)->check(CLI::PositiveNumber);
  eval->add_option("--target-alpha", eval_opts.target_alpha);
  eval->add_option("--tolerance", eval_opts.tolerance);
  eval->add_option("--tau-e", eval_opts.tau_e, "skip calibration, use this");
  eval->add_option("--report", eval_opts.report, "JSON report path");
  eval->add_option("--matrix", eval_opts.matrix,
                   "accuracy matrix CSV (rows kinds, cols spans)");
  eval->callback([&] {
    auto cfg = effective_config(global);
    cfg.pattern = eval_opts.pattern;
    const auto pattern = patmark::parse_pattern(cfg.pattern);
    const auto windows = patmark::valid_windows(pattern, eval_opts.window);
    std::optional<WatermarkSetup> setup;
    const auto instances_of = [&](const std::vector<patmark::Record>& corpus) {
      std::vector<patmark::EvalInstance> instances;
      for (const auto& rec : corpus) {
        patmark::EvalInstance inst;
        inst.id = rec.id;
        if (!rec.seq.tags.empty()) {
          inst.tags = rec.seq.tags;
        } else {
          if (!setup) setup = watermark_setup(cfg);
          inst.tags = patmark::tags_of_tokens(rec.seq.tokens, setup->partition);
        }
        inst.has_ground_truth = patmark::has_edit_meta(rec);
        if (inst.has_ground_truth) {
          inst.true_positions = patmark::true_positions_of(rec);
          const auto [kind, span] = patmark::edit_bucket(rec);
          inst.kind = kind;
          inst.span = span;
        }
        instances.push_back(std::move(inst));
      }
      return instances;
    };

    double tau_e;
    if (eval_opts.tau_e) {
      tau_e = *eval_opts.tau_e;
    } else {
      if (eval_opts.clean.empty())
        throw patmark::ConfigError("need --tau-e or --clean for calibration");
      const auto clean = patmark::read_corpus_file(eval_opts.clean);
      std::vector<std::vector<patmark::Tag>> clean_tags;
      for (const auto& rec : clean) {
        if (!rec.seq.tags.empty()) {
          clean_tags.push_back(rec.seq.tags);
        } else {
          if (!setup) setup = watermark_setup(cfg);
          clean_tags.push_back(
              patmark::tags_of_tokens(rec.seq.tokens, setup->partition));
        }
      }
      tau_e = patmark::calibrate_edit_threshold(clean_tags, eval_opts.window,
                                                windows, eval_opts.target_alpha,
                                                eval_opts.tolerance);
    }

    const auto edited = patmark::read_corpus_file(eval_opts.edited);
    const auto report = patmark::evaluate_suite(
        instances_of(edited), windows,
        patmark::EditDetectorConfig{eval_opts.window, tau_e, false},
        eval_opts.tolerance);

    auto j = patmark::eval_report_json(report);
    j["tau_e"] = tau_e;
    if (!eval_opts.report.empty()) write_text_file(eval_opts.report, j.dump(2) + "\n");
    if (!eval_opts.matrix.empty()) {
      std::int64_t span_min = 1, span_max = 1;
      for (const auto& [kind, spans] : report.by_kind_span) {
        (void)kind;
        for (const auto& [span, stats] : spans) {
          (void)stats;
          if (span >= 1) span_max = std::max(span_max, span);
        }
      }
      std::ostringstream os;
      patmark::write_accuracy_matrix(report, span_min, span_max, os);
      write_text_file(eval_opts.matrix, os.str());
    }
    if (!global.quiet) {
      std::cout << "tau_e " << patmark::format_double(tau_e) << '\n';
      if (report.detection_accuracy)
        std::cout << "accuracy "
                  << patmark::format_double(*report.detection_accuracy)
                  << '\n';
      if (report.type1_rate)
        std::cout << "type1 "
                  << patmark::format_double(*report.type1_rate) << '\n';
    }
  });

  // ---- bounds ----
  auto* bounds = app.add_subcommand("bounds", "closed-form bound calculators");
  struct {
    std::string kind, profile_path, p_file;
    int w = 2;
    std::int64_t T = 64;
    double tau_e = 0.75, tau_d = 0.5, mu0 = 0.0, mu1 = 1.0, delta = 5.8;
    std::optional<std::int32_t> uniform_vocab;
    std::int64_t M = 0, N = 1, s_ins = 0, s_del = 0, s_rep = 0;
  } b_opts;
  bounds
      ->add_option("--kind", b_opts.kind,
                   "false-alarm|miss|wm-power|wm-type1|adherence|robustness")
      ->required();
  bounds->add_option("--profile", b_opts.profile_path, "CSV file: w,mu");
  bounds->add_option("-w,--window", b_opts.w);
  bounds->add_option("-T,--length", b_opts.T);
  bounds->add_option("--tau-e", b_opts.tau_e);
  bounds->add_option("--tau-d", b_opts.tau_d);
  bounds->add_option("--mu0", b_opts.mu0);
  bounds->add_option("--mu1", b_opts.mu1);
  bounds->add_option("--delta", b_opts.delta);
  bounds->add_option("--p-file", b_opts.p_file,
                     "next-token probabilities, whitespace-separated");
  bounds->add_option("--uniform-vocab", b_opts.uniform_vocab,
                     "use a uniform distribution of this size");
  bounds->add_option("-M,--match-count", b_opts.M);
  bounds->add_option("-N,--window-count", b_opts.N);
  bounds->add_option("--s-ins", b_opts.s_ins);
  bounds->add_option("--s-del", b_opts.s_del);
  bounds->add_option("--s-rep", b_opts.s_rep);
  bounds->callback([&] {
    try {
      double value;
      if (b_opts.kind == "false-alarm") {
        patmark::AlignmentProfile profile;
        if (!b_opts.profile_path.empty()) {
          profile = read_profile_file(b_opts.profile_path);
        } else {
          for (int k = b_opts.w; k <= 2 * b_opts.w - 1; ++k)
            profile.mu[k] = b_opts.mu1;
        }
        value = patmark::false_alarm_bound(profile, b_opts.w, b_opts.tau_e);
      } else if (b_opts.kind == "miss") {
        value = patmark::miss_detection_bound(b_opts.mu0, b_opts.w, b_opts.tau_e);
      } else if (b_opts.kind == "wm-power") {
        double mu1 = b_opts.mu1;
        if (!b_opts.profile_path.empty())
          mu1 = read_profile_file(b_opts.profile_path).at(b_opts.w);
        value = patmark::watermark_power_bound(b_opts.T, b_opts.w, mu1,
                                               b_opts.tau_d);
      } else if (b_opts.kind == "wm-type1") {
        value = patmark::watermark_type1_bound(b_opts.T, b_opts.w, b_opts.mu0,
                                               b_opts.tau_d);
      } else if (b_opts.kind == "adherence") {
        std::vector<double> p;
        if (!b_opts.p_file.empty()) {
          p = read_probability_file(b_opts.p_file);
        } else if (b_opts.uniform_vocab) {
          p.assign(static_cast<std::size_t>(*b_opts.uniform_vocab),
                   1.0 / *b_opts.uniform_vocab);
        } else {
          throw patmark::ConfigError("adherence needs --p-file or --uniform-vocab");
        }
        value = patmark::token_adherence_lower_bound(b_opts.delta, p);
      } else if (b_opts.kind == "robustness") {
        value = patmark::robustness_bound(b_opts.M, b_opts.N, b_opts.w,
                                          b_opts.s_ins, b_opts.s_del,
                                          b_opts.s_rep);
      } else {
        throw patmark::ConfigError("unknown bound kind '" + b_opts.kind + "'");
      }
      std::cout << patmark::format_double(value) << '\n'
                << "status: " << (patmark::bound_vacuous(value)
                                      ? "vacuous (outside [0,1])"
                                      : "applicable")
                << '\n';
    } catch (const patmark::BoundError& e) {
      std::cout << "nan\nstatus: inapplicable (" << e.what() << ")\n";
    }
  });

  // ---- calibrate ----
  auto* calibrate = app.add_subcommand("calibrate", "threshold calibration");
  struct {
    std::string input;
    std::string kind = "edit";  // or "watermark"
    std::string pattern = "AB";
    int window = 2;
    double target_alpha = 0.1;
    std::int64_t tolerance = 3;
  } cal_opts;
  calibrate->add_option("--input", cal_opts.input, "calibration corpus JSONL")
      ->required();
  calibrate->add_option("--kind", cal_opts.kind, "edit (tau_e) or watermark (tau_d)");
  calibrate->add_option("--pattern", cal_opts.pattern);
  calibrate->add_option("--window", cal_opts.window)->check(CLI::PositiveNumber);
  calibrate->add_option("--target-alpha", cal_opts.target_alpha);
  calibrate->add_option("--tolerance", cal_opts.tolerance);
  calibrate->callback([&] {
    auto cfg = effective_config(global);
    cfg.pattern = cal_opts.pattern;
    const auto pattern = patmark::parse_pattern(cfg.pattern);
    const auto windows = patmark::valid_windows(pattern, cal_opts.window);
    const auto corpus = patmark::read_corpus_file(cal_opts.input);
    std::optional<WatermarkSetup> setup;
    std::vector<std::vector<patmark::Tag>> tags;
    for (const auto& rec : corpus) {
      if (!rec.seq.tags.empty()) {
        tags.push_back(rec.seq.tags);
      } else {
        if (!setup) setup = watermark_setup(cfg);
        tags.push_back(patmark::tags_of_tokens(rec.seq.tokens, setup->partition));
      }
    }
    double tau;
    if (cal_opts.kind == "edit")
      tau = patmark::calibrate_edit_threshold(tags, cal_opts.window, windows,
                                              cal_opts.target_alpha,
                                              cal_opts.tolerance);
    else if (cal_opts.kind == "watermark")
      tau = patmark::calibrate_watermark_threshold(tags, cal_opts.window,
                                                   windows,
                                                   cal_opts.target_alpha);
    else
      throw patmark::ConfigError("calibrate kind must be edit or watermark");
    std::cout << patmark::format_double(tau) << '\n';
  });

  // ---- run ----
  auto* run = app.add_subcommand("run", "full pipeline from config");
  struct {
    std::optional<std::string> output_dir;
  } run_opts;
  run->add_option("--output-dir", run_opts.output_dir);
  run->callback([&] {
    auto cfg = effective_config(global);
    if (run_opts.output_dir) cfg.output_dir = *run_opts.output_dir;
    const auto result = patmark::run_pipeline(
        cfg, global.threads, global.quiet ? nullptr : &std::cout);
    if (!global.quiet) std::cout << "summary: " << result.summary_path << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const patmark::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const patmark::CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
