// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup_cli.hpp"

#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "soup/dataset.hpp"
#include "soup/error.hpp"
#include "soup/mock.hpp"
#include "soup/pipeline.hpp"
#include "soup/protocol.hpp"
#include "soup/report.hpp"
#include "soup/task.hpp"

namespace soup::cli {

namespace fs = std::filesystem;

namespace {

struct Args {
  std::string task;
  std::string pool;
  std::string test;
  std::string cache;
  std::string sidecar;
  std::string out;
  std::size_t k = 10;
  std::string strategy = "boc";
  std::string weighting = "uniform";
  std::size_t iterations = 3;
  std::size_t budget = 120;
  std::size_t pool_cap = 10000;
  std::size_t test_cap = 10000;
  std::uint64_t seed = 0;
  std::string scorer_url;
  std::string mock_scorer;
  bool baseline = false;
  std::size_t jobs = 1;
  bool to_stdout = false;
  bool precompute_inline = false;
};

struct Backend {
  std::shared_ptr<const Scorer> scorer;
  std::shared_ptr<const Encoder> encoder;
};

Backend open_backend(const Args& args) {
  if (!args.mock_scorer.empty()) {
    auto mock = mock::load_backend(args.mock_scorer);
    return {mock.scorer, mock.encoder};
  }
  auto url = protocol::resolve_scorer_url(args.scorer_url.empty() ? std::nullopt
                                                                   : std::optional<std::string>(args.scorer_url));
  if (!url) {
    throw ConfigError("no scorer configured: pass --scorer-url, set SOUP_SCORER_URL, or use --mock-scorer");
  }
  auto http = std::make_shared<protocol::HttpBackend>(*url);
  return {http, http};
}

SoupConfig make_config(const Args& args, const TaskConfig& task) {
  SoupConfig cfg;
  cfg.task = task.name();
  cfg.k = args.k;
  cfg.strategy = parse_strategy(args.strategy);
  cfg.weighting = parse_weighting(args.weighting);
  cfg.iterations = args.iterations;
  cfg.example_token_budget = args.budget;
  cfg.pool_cap = args.pool_cap;
  cfg.test_cap = args.test_cap;
  cfg.seed = args.seed;
  cfg.jobs = args.jobs;
  cfg.validate();
  return cfg;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required for this command");
}

fs::path sidecar_path(const Args& args) {
  if (!args.sidecar.empty()) return args.sidecar;
  return fs::path(args.cache + ".labels.json");
}

UnlabeledPool load_or_build_pool(const Args& args, const TaskConfig& task, const SoupConfig& cfg,
                                 const Backend& backend, const CalibrationTable& calib, std::ostream& err) {
  require(args.pool, "--pool");
  const Dataset pool_ds = load_jsonl(args.pool, task);
  if (args.precompute_inline) {
    err << "precomputing pool of " << std::min(pool_ds.size(), cfg.pool_cap) << " examples\n";
    return precompute_pool(*backend.scorer, *backend.encoder, task, pool_ds, cfg, calib);
  }
  require(args.cache, "--cache");
  auto index = EmbeddingIndex::load(args.cache);
  auto predictions = report::sidecar_from_json(report::read_json(sidecar_path(args)), task);
  return UnlabeledPool::assemble(pool_ds, std::move(index), std::move(predictions));
}

Dataset load_test_set(const Args& args, const TaskConfig& task, const SoupConfig& cfg) {
  require(args.test, "--test");
  return subsample(load_jsonl(args.test, task), cfg.test_cap, cfg.seed);
}

void emit(const Args& args, const nlohmann::json& doc, std::ostream& out) {
  if (!args.out.empty()) {
    report::write_json(args.out, doc);
  } else if (!args.to_stdout) {
    out << doc.dump(2) << '\n';
  }
}

int cmd_precompute(const Args& args, std::ostream& err) {
  require(args.pool, "--pool");
  require(args.cache, "--cache");
  const auto task = resolve_task(args.task);
  const auto cfg = make_config(args, task);
  const Backend backend = open_backend(args);
  const auto calib = calibrate(*backend.scorer, task);

  const Dataset raw = load_jsonl(args.pool, task);
  const auto pool = precompute_pool(*backend.scorer, *backend.encoder, task, raw, cfg, calib);
  pool.index().save(args.cache);
  report::write_json(sidecar_path(args), report::sidecar_json(pool.self_predictions()));
  err << "precomputed " << pool.size() << " pool examples (dim " << pool.index().dim() << ") into " << args.cache
      << "\n";
  return kOk;
}

int cmd_classify(const Args& args, std::ostream& out, std::ostream& err) {
  const auto task = resolve_task(args.task);
  const auto cfg = make_config(args, task);
  const Dataset test = load_test_set(args, task, cfg);
  const Backend backend = open_backend(args);
  const auto calib = calibrate(*backend.scorer, task);
  const auto pool = load_or_build_pool(args, task, cfg, backend, calib, err);

  const auto results = classify_all(*backend.scorer, *backend.encoder, pool, task, test.examples, cfg, calib);
  std::optional<double> acc;
  if (test.has_gold_labels() && !test.examples.empty()) {
    std::map<std::string, LabelId> predicted;
    for (std::size_t i = 0; i < results.size(); ++i) predicted[test.examples[i].id] = results[i].prediction.label;
    acc = accuracy(predicted, test);
  }
  if (args.to_stdout) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      out << test.examples[i].id << '\t' << task.label_name(results[i].prediction.label) << '\n';
    }
  }
  emit(args, report::run_report(task, cfg, test.examples, results, acc), out);
  return kOk;
}

int cmd_eval(const Args& args, std::ostream& out, std::ostream& err) {
  const auto task = resolve_task(args.task);
  const auto cfg = make_config(args, task);
  const Dataset test = load_test_set(args, task, cfg);
  if (test.examples.empty()) throw EvaluationError("test set is empty");
  if (!test.has_gold_labels()) throw EvaluationError("test set " + args.test + " lacks gold labels");

  const Backend backend = open_backend(args);
  const auto calib = calibrate(*backend.scorer, task);
  const auto pool = load_or_build_pool(args, task, cfg, backend, calib, err);

  const auto results = classify_all(*backend.scorer, *backend.encoder, pool, task, test.examples, cfg, calib);
  std::map<std::string, LabelId> predicted;
  for (std::size_t i = 0; i < results.size(); ++i) predicted[test.examples[i].id] = results[i].prediction.label;
  const double acc = accuracy(predicted, test);

  auto doc = report::eval_report(task, cfg, test.size(), acc);
  out << std::setprecision(6) << "accuracy: " << acc << '\n';
  if (args.baseline) {
    std::map<std::string, LabelId> baseline;
    for (const auto& x : test.examples) {
      baseline[x.id] = prompt_only(*backend.scorer, task, x, calib, cfg.example_token_budget).label;
    }
    const double base_acc = accuracy(baseline, test);
    doc["baseline_accuracy"] = base_acc;
    out << "baseline_accuracy: " << base_acc << '\n';
  }
  if (!args.out.empty()) report::write_json(args.out, doc);
  return kOk;
}

int cmd_iterate(const Args& args, std::ostream& err) {
  const auto task = resolve_task(args.task);
  auto cfg = make_config(args, task);
  if (cfg.weighting != WeightingKind::kUniform) err << "note: iterative refinement always uses uniform weighting\n";
  cfg.weighting = WeightingKind::kUniform;
  require(args.cache, "--cache");
  if (cfg.iterations == 0) {
    err << "0 iterations requested; sidecar left unchanged\n";
    return kOk;
  }

  const Backend backend = open_backend(args);
  const auto calib = calibrate(*backend.scorer, task);
  Args cached = args;
  cached.precompute_inline = false;
  const auto pool = load_or_build_pool(cached, task, cfg, backend, calib, err);

  const auto refined = iterative_soup(*backend.scorer, pool, task, cfg, calib, [&](std::size_t it, std::size_t n) {
    err << "iteration " << it << ": " << n << " of " << pool.size() << " labels changed\n";
  });
  report::write_json(sidecar_path(args), report::sidecar_json(refined.self_predictions()));
  return kOk;
}

void add_common_options(CLI::App& app, Args& args) {
  app.add_option("--task", args.task, "Built-in task name (imdb, yelp, agnews, yahoo) or task config file")
      ->required();
  app.add_option("--pool", args.pool, "Unlabeled pool dataset (JSONL)");
  app.add_option("--test", args.test, "Test dataset (JSONL)");
  app.add_option("--cache", args.cache, "Embedding cache file (SOUPEMB1)");
  app.add_option("--sidecar", args.sidecar, "Self-prediction sidecar (default: <cache>.labels.json)");
  app.add_option("--out", args.out, "Report output path (default: stdout)");
  app.add_option("--k", args.k, "Number of neighbors")->check(CLI::PositiveNumber);
  app.add_option("--strategy", args.strategy, "Priming strategy")->check(CLI::IsMember({"boc", "concat"}));
  app.add_option("--weighting", args.weighting, "Bag-of-contexts weighting")
      ->check(CLI::IsMember({"uniform", "similarity"}));
  app.add_option("--iterations", args.iterations, "Refinement iterations");
  app.add_option("--budget", args.budget, "Per-example token budget")->check(CLI::PositiveNumber);
  app.add_option("--pool-cap", args.pool_cap, "Maximum pool size")->check(CLI::PositiveNumber);
  app.add_option("--test-cap", args.test_cap, "Maximum test set size")->check(CLI::PositiveNumber);
  app.add_option("--seed", args.seed, "Seed for subsampling");
  app.add_option("--scorer-url", args.scorer_url, "Scoring service URL (default: $SOUP_SCORER_URL)");
  app.add_option("--mock-scorer", args.mock_scorer, "Mock scorer table (JSON) for model-free runs")
      ->check(CLI::ExistingFile);
  app.add_flag("--baseline", args.baseline, "Also evaluate the prompt-only baseline");
  app.add_option("--jobs", args.jobs, "Concurrent scorer requests")->check(CLI::PositiveNumber);
  app.add_flag("--stdout", args.to_stdout, "Print one id<TAB>label line per example");
  app.add_flag("--precompute-inline", args.precompute_inline, "Precompute the pool in memory instead of a cache");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retrieval-primed zero-shot text classification with unlabeled examples", "soup"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with flag defaults; explicit flags win");
  Args args;
  add_common_options(app, args);

  auto* precompute = app.add_subcommand("precompute", "Embed and self-label the unlabeled pool");
  auto* classify_cmd = app.add_subcommand("classify", "Classify a dataset and write a prediction report");
  auto* eval = app.add_subcommand("eval", "Classify a labeled dataset and report accuracy");
  auto* iterate = app.add_subcommand("iterate", "Iteratively refine the pool's self-predictions");
  for (auto* sub : {precompute, classify_cmd, eval, iterate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "soup: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (precompute->parsed()) return cmd_precompute(args, err);
    if (classify_cmd->parsed()) return cmd_classify(args, out, err);
    if (eval->parsed()) return cmd_eval(args, out, err);
    return cmd_iterate(args, err);
  } catch (const IoError& e) {
    err << "soup: scorer/I-O failure: " << e.what() << '\n';
    return kScorerError;
  } catch (const ProtocolError& e) {
    err << "soup: scorer protocol error: " << e.what() << '\n';
    return kScorerError;
  } catch (const EvaluationError& e) {
    err << "soup: " << e.what() << '\n';
    return kNoGoldLabels;
  } catch (const Error& e) {
    err << "soup: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace soup::cli
