// Copyright 2026 The sensorplace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sensorplace/cli.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <omp.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "csv.h"
#include "json.hpp"
#include "sensorplace/bench.h"
#include "sensorplace/dataset.h"
#include "sensorplace/placement.h"
#include "sensorplace/temporal.h"

namespace sensorplace {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration:
    case ErrorKind::kParameter:
    case ErrorKind::kBudget:
      return 2;
    default:
      return 1;
  }
}

void configure_logging() {
  static bool done = false;
  if (!done) {
    auto logger = spdlog::get("sensorplace");
    if (!logger) logger = spdlog::stderr_logger_mt("sensorplace");
    spdlog::set_default_logger(logger);
    done = true;
  }
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("SENSORPLACE_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kBundle, "cannot write " + path.string());
  out << text;
}

void write_effective(const fs::path& dir, const json& config) {
  write_text(dir / "effective_config.json", config.dump(2) + "\n");
}

fs::path parent_or_cwd(const fs::path& file) {
  return file.has_parent_path() ? file.parent_path() : fs::path(".");
}

// Shared model and split settings of place, plan and evaluate.
struct RunSettings {
  std::string bundle;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> split_seed;
  std::string config_file;
  std::optional<int> trees;
  std::optional<int> max_depth;
  std::optional<double> learning_rate;
  std::optional<std::string> split_mode;
  std::optional<double> outlier_k;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--bundle", bundle, "Dataset bundle directory")->required();
    cmd->add_option("--seed", seed, "Seed for every stochastic step")->required();
    cmd->add_option("--split-seed", split_seed, "Seed of the segment split (default: --seed)");
    cmd->add_option("--config", config_file,
                    "JSON with regressor, active_learning, greedy_cells_per_side, "
                    "outlier_k_sigma");
    cmd->add_option("--trees", trees, "Boosting rounds");
    cmd->add_option("--max-depth", max_depth, "Tree depth");
    cmd->add_option("--learning-rate", learning_rate, "Shrinkage");
    cmd->add_option("--split-mode", split_mode, "exact or binned");
    cmd->add_option("--outliers", outlier_k, "Drop counts beyond k sample sd per segment");
  }
};

void apply_regressor_flags(json& reg, const RunSettings& s) {
  if (s.trees) reg["n_trees"] = *s.trees;
  if (s.max_depth) reg["max_depth"] = *s.max_depth;
  if (s.learning_rate) reg["learning_rate"] = *s.learning_rate;
  if (s.split_mode) reg["split_mode"] = *s.split_mode;
}

// The merged run configuration: file values, then flags.
json effective_run_config(const RunSettings& s, const std::string& command) {
  json cfg = s.config_file.empty() ? json::object() : read_json(s.config_file);
  if (!cfg.is_object()) throw Error(ErrorKind::kConfiguration, "--config must hold an object");
  for (const auto& [key, value] : cfg.items()) {
    if (key != "regressor" && key != "active_learning" && key != "greedy_cells_per_side" &&
        key != "outlier_k_sigma") {
      throw Error(ErrorKind::kConfiguration, "unknown config field '" + key + "'");
    }
  }
  json reg = RegressorConfig::from_json(cfg.value("regressor", json::object())).to_json();
  apply_regressor_flags(reg, s);
  reg["seed"] = s.seed;
  json al = ActiveLearningConfig::from_json(cfg.value("active_learning", json::object())).to_json();
  apply_regressor_flags(al["regressor"], s);
  cfg["regressor"] = reg;
  cfg["active_learning"] = al;
  cfg["greedy_cells_per_side"] = cfg.value("greedy_cells_per_side", 200.0);
  if (s.outlier_k) cfg["outlier_k_sigma"] = *s.outlier_k;
  cfg["command"] = command;
  cfg["bundle"] = s.bundle;
  cfg["seed"] = s.seed;
  cfg["split_seed"] = s.split_seed.value_or(s.seed);
  return cfg;
}

Dataset prepare_dataset(const fs::path& bundle, const json& cfg) {
  Dataset ds = load_dataset(bundle);
  if (cfg.contains("outlier_k_sigma") && !cfg["outlier_k_sigma"].is_null()) {
    auto [filtered, report] = filter_outliers(ds, cfg["outlier_k_sigma"].get<double>());
    spdlog::info("outlier filter removed {} of {} observations", report.removed.size(),
                 report.total);
    ds = std::move(filtered);
  }
  return ds;
}

std::vector<SegmentId> read_id_list(const fs::path& path) {
  const csv::Table t = csv::read(path);
  const std::size_t col = t.require("segment_id");
  std::vector<SegmentId> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto id = csv::to_int(t.rows[r][col]);
    if (!id) {
      throw Error(ErrorKind::kParse, path.filename().string() + " row " + std::to_string(r + 2) +
                                         ": malformed segment_id");
    }
    ids.push_back(*id);
  }
  return ids;
}

Placement read_placement(const fs::path& path) {
  const json doc = read_json(path);
  try {
    return Placement::from_json(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& bundle, std::optional<double> outlier_k) {
  const Dataset ds = load_dataset(bundle);
  json summary = {{"bundle", bundle},
                  {"segments", ds.segments.size()},
                  {"observations", ds.observations.size()},
                  {"dates", ds.calendar.dates().size()},
                  {"hourly", ds.hourly()},
                  {"static_columns", ds.static_features.columns},
                  {"temporal_columns", ds.temporal_features.columns},
                  {"spatiotemporal_columns", ds.spatiotemporal_features.columns},
                  {"existing_sensors", ds.existing_sensors.size()},
                  {"boundary_inferred", ds.boundary_inferred},
                  {"graph_edges", ds.graph.edge_count()}};
  if (outlier_k) summary["outliers"] = filter_outliers(ds, *outlier_k).second.to_json();
  std::cout << summary.dump(2) << '\n';
  return 0;
}

struct SynthOptions {
  SyntheticCityConfig config;
  std::string out;
};

int cmd_synth(const SynthOptions& o) {
  const auto [ds, truth] = generate_synthetic_city(o.config);
  save_dataset(ds, o.out);
  json hotspots = json::array();
  for (const Hotspot& h : truth.hotspots) {
    hotspots.push_back({{"x", h.center.x}, {"y", h.center.y}, {"amplitude", h.amplitude},
                        {"sigma", h.sigma}});
  }
  write_text(fs::path(o.out) / "truth.json",
             json{{"intercept", truth.intercept}, {"hotspots", hotspots}}.dump(2) + "\n");
  write_effective(o.out, {{"command", "synth"}, {"synthetic", o.config.to_json()}});
  std::cout << "wrote " << ds.segments.size() << " segments, " << ds.observations.size()
            << " observations to " << o.out << '\n';
  return 0;
}

struct PlaceOptions {
  RunSettings run;
  std::string strategy;
  std::optional<std::string> subset;
  int budget = 0;
  std::string initial;
  std::string out;
};

int cmd_place(const PlaceOptions& o) {
  const json cfg = effective_run_config(o.run, "place");
  const StrategyDescriptor strategy = StrategyDescriptor::parse(
      o.strategy, o.subset ? std::optional<std::string_view>(*o.subset) : std::nullopt);
  const Dataset ds = prepare_dataset(o.run.bundle, cfg);
  const SplitAssignment split = split_segments(ds, {}, cfg["split_seed"].get<std::uint64_t>());
  std::vector<SegmentId> initial;
  if (!o.initial.empty()) initial = read_id_list(o.initial);

  std::unique_ptr<ModelFeatures> features;
  PlacementInputs in;
  in.dataset = &ds;
  in.candidates = split.train;
  in.active_learning = ActiveLearningConfig::from_json(cfg["active_learning"]);
  in.greedy_cells_per_side = cfg["greedy_cells_per_side"].get<double>();
  if (strategy.family == StrategyFamily::kActiveLearning) {
    features = std::make_unique<ModelFeatures>(ds, split.train);
    in.features = features.get();
  }
  const Placement p = place(strategy, in, o.budget, initial, o.run.seed);
  write_text(o.out, p.to_json().dump(2) + "\n");
  json eff = cfg;
  eff["strategy"] = strategy.label();
  eff["budget"] = o.budget;
  eff["initial"] = initial;
  eff["out"] = o.out;
  write_effective(parent_or_cwd(o.out), eff);
  return 0;
}

struct PlanOptions {
  RunSettings run;
  std::string placement;
  std::string scheme;
  int days = 0;
  std::string out;
};

int cmd_plan(const PlanOptions& o) {
  const json cfg = effective_run_config(o.run, "plan");
  const Scheme scheme = Scheme::parse(o.scheme);
  const Dataset ds = prepare_dataset(o.run.bundle, cfg);
  const Placement p = read_placement(o.placement);
  const std::vector<Date> dates = sample_days(ds.calendar, o.days, o.run.seed);
  const DeploymentPlan plan = allocate_plan(scheme, dates, p.selected, ds.calendar, o.run.seed);
  write_text(o.out, plan.to_csv());
  json eff = cfg;
  eff["placement"] = o.placement;
  eff["scheme"] = scheme.label();
  eff["days"] = o.days;
  eff["out"] = o.out;
  eff["plan"] = plan.to_json();
  write_effective(parent_or_cwd(o.out), eff);
  return 0;
}

struct EvaluateOptions {
  RunSettings run;
  std::string placement;
  std::string plan;
  std::string out;
};

int cmd_evaluate(const EvaluateOptions& o) {
  const json cfg = effective_run_config(o.run, "evaluate");
  const Dataset ds = prepare_dataset(o.run.bundle, cfg);
  const SplitAssignment split = split_segments(ds, {}, cfg["split_seed"].get<std::uint64_t>());
  const Placement p = read_placement(o.placement);
  std::optional<DeploymentPlan> plan;
  if (!o.plan.empty()) plan = DeploymentPlan::read_csv(o.plan);
  const RegressorConfig reg = RegressorConfig::from_json(cfg["regressor"]);
  const Evaluator ev(ds, split);
  json result = {{"placement", o.placement},
                 {"strategy", p.strategy.label()},
                 {"budget", p.selected.size()},
                 {"deployment", plan ? "temporary" : "permanent"}};
  if (plan) result["scheme"] = plan->scheme.label();
  for (const EvaluationResult& r : ev.evaluate(p, plan ? &*plan : nullptr, reg)) {
    result[std::string(to_string(r.metric))] = r.value;
    result["n"] = r.n;
  }
  const std::string text = result.dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) {
    write_text(o.out, text);
    json eff = cfg;
    eff["placement"] = o.placement;
    eff["plan"] = o.plan;
    eff["out"] = o.out;
    write_effective(parent_or_cwd(o.out), eff);
  }
  return 0;
}

struct BenchOptions {
  std::string experiment;
  std::string config;
  std::string bundle;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool fast = false;
  bool plots = false;
};

int cmd_bench(const BenchOptions& o) {
  json doc = read_json(o.config);
  if (!doc.is_object()) throw Error(ErrorKind::kConfiguration, "bench config must be an object");
  const fs::path base = parent_or_cwd(o.config);
  json bench = doc;
  for (const char* key : {"bundle", "synthetic", "split_seed", "outlier_k_sigma"}) bench.erase(key);
  if (o.seed) bench["seeds"] = json::array({*o.seed});
  if (!bench.contains("seeds") || bench["seeds"].empty()) {
    throw Error(ErrorKind::kConfiguration, "bench: seeds are required (config 'seeds' or --seed)");
  }
  if (o.fast && o.experiment == "spatial") bench["random_repetitions"] = 100;

  Dataset ds;
  json source;
  if (!o.bundle.empty() || doc.contains("bundle")) {
    fs::path bundle = o.bundle.empty() ? fs::path(doc["bundle"].get<std::string>()) : fs::path(o.bundle);
    if (o.bundle.empty() && bundle.is_relative()) bundle = base / bundle;
    source = {{"bundle", bundle.string()}};
    ds = load_dataset(bundle);
  } else if (doc.contains("synthetic")) {
    const SyntheticCityConfig sc = SyntheticCityConfig::from_json(doc["synthetic"]);
    source = {{"synthetic", sc.to_json()}};
    ds = generate_synthetic_city(sc).first;
  } else {
    throw Error(ErrorKind::kConfiguration, "bench: config needs 'bundle' or 'synthetic'");
  }
  if (doc.contains("outlier_k_sigma")) {
    const double k = doc["outlier_k_sigma"].get<double>();
    source["outlier_k_sigma"] = k;
    ds = filter_outliers(ds, k).first;
  }
  const std::uint64_t split_seed =
      doc.contains("split_seed") ? doc["split_seed"].get<std::uint64_t>()
                                 : bench["seeds"][0].get<std::uint64_t>();
  const SplitAssignment split = split_segments(ds, {}, split_seed);
  const Evaluator ev(ds, split);

  BenchmarkReport report;
  json effective;
  if (o.experiment == "spatial") {
    const auto cfg = SpatialBenchmarkConfig::from_json(bench);
    effective = cfg.to_json();
    report = run_spatial_benchmark(ev, cfg);
  } else if (o.experiment == "temporal") {
    const auto cfg = TemporalBenchmarkConfig::from_json(bench);
    effective = cfg.to_json();
    report = run_temporal_benchmark(ev, cfg);
  } else {
    const auto cfg = ComparisonConfig::from_json(bench);
    effective = cfg.to_json();
    report = compare_permanent_temporary(ev, cfg);
  }
  report.metadata["source"] = source;
  report.write(o.out);
  if (o.plots) write_plots(report, o.out);
  effective["experiment"] = o.experiment;
  effective["split_seed"] = split_seed;
  effective["source"] = source;
  write_effective(o.out, effective);
  std::cout << "wrote " << report.rows.size() << " rows to " << (fs::path(o.out) / "report.csv").string()
            << '\n';
  return 0;
}

struct ReportOptions {
  std::string in;
  bool plots = false;
  std::string out;
};

int cmd_report(const ReportOptions& o) {
  const BenchmarkReport report = BenchmarkReport::from_csv(o.in);
  // Mean over seeds per (strategy, scheme, deployment, budget, metric).
  std::map<std::tuple<std::string, std::string, std::string, int, std::string>,
           std::pair<double, int>>
      cells;
  for (const ReportRow& r : report.rows) {
    if (!std::isfinite(r.value)) continue;
    auto& c = cells[{r.strategy, r.scheme, r.deployment, r.budget, r.metric}];
    c.first += r.value;
    c.second += 1;
  }
  std::cout << "strategy,scheme,deployment,budget,metric,mean,seeds\n";
  for (const auto& [key, c] : cells) {
    const auto& [strategy, scheme, deployment, budget, metric] = key;
    std::cout << strategy << ',' << scheme << ',' << deployment << ',' << budget << ',' << metric
              << ',' << format_double(c.first / c.second) << ',' << c.second << '\n';
  }
  if (o.plots) {
    const fs::path dir = o.out.empty() ? parent_or_cwd(o.in) : fs::path(o.out);
    for (const fs::path& p : write_plots(report, dir)) spdlog::info("wrote {}", p.string());
    write_effective(dir, {{"command", "report"}, {"in", o.in}, {"plots", true}});
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  configure_logging();
  CLI::App app{"sensorplace: sensor placement and traffic interpolation benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<int> jobs;
  app.add_option("--jobs", jobs, "Worker threads (default: hardware parallelism)")
      ->check(CLI::PositiveNumber);

  std::string validate_bundle;
  std::optional<double> validate_outliers;
  auto* validate = app.add_subcommand("validate", "Load and validate a dataset bundle");
  validate->add_option("bundle", validate_bundle, "Dataset bundle directory")->required();
  validate->add_option("--outliers", validate_outliers, "Report the outlier filter at k sd");

  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic grid city bundle");
  synth->add_option("--width", synth_opts.config.width, "Intersections per row")
      ->capture_default_str();
  synth->add_option("--height", synth_opts.config.height, "Intersections per column")
      ->capture_default_str();
  synth->add_option("--days", synth_opts.config.n_days, "Calendar length")->capture_default_str();
  synth->add_option("--noise", synth_opts.config.noise_scale, "Log-noise sd")
      ->capture_default_str();
  synth->add_option("--hotspots", synth_opts.config.hotspots, "Gaussian bumps")
      ->capture_default_str();
  synth->add_option("--spacing", synth_opts.config.spacing, "Meters between intersections")
      ->capture_default_str();
  synth->add_option("--start", synth_opts.config.start_date, "First date (ISO-8601)")
      ->capture_default_str();
  synth->add_option("--seed", synth_opts.config.seed, "Generator seed")->required();
  synth->add_option("--out", synth_opts.out, "Output bundle directory")->required();

  PlaceOptions place_opts;
  auto* place_cmd = app.add_subcommand("place", "Select sensor locations among training segments");
  place_opts.run.add_to(place_cmd);
  place_cmd->add_option("--strategy", place_opts.strategy, "Strategy, e.g. dispersion")->required();
  place_cmd->add_option("--subset", place_opts.subset, "Feature subset for feature strategies");
  place_cmd->add_option("--budget", place_opts.budget, "Total sensors K")->required();
  place_cmd->add_option("--initial", place_opts.initial, "CSV with segment_id of existing sensors");
  place_cmd->add_option("--out", place_opts.out, "Placement JSON")->required();

  PlanOptions plan_opts;
  auto* plan_cmd = app.add_subcommand("plan", "Allocate a temporary deployment plan");
  plan_opts.run.add_to(plan_cmd);
  plan_cmd->add_option("--placement", plan_opts.placement, "Placement JSON")->required();
  plan_cmd->add_option("--scheme", plan_opts.scheme, "rotating:N, weekday:W|evenly, seasonal:S|evenly")
      ->required();
  plan_cmd->add_option("--days", plan_opts.days, "Observation-day budget D")->required();
  plan_cmd->add_option("--out", plan_opts.out, "Plan CSV")->required();

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Test error of a placement or plan");
  eval_opts.run.add_to(evaluate);
  evaluate->add_option("--placement", eval_opts.placement, "Placement JSON")->required();
  evaluate->add_option("--plan", eval_opts.plan, "Plan CSV for a temporary deployment");
  evaluate->add_option("--out", eval_opts.out, "Result JSON");

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Run a benchmark experiment");
  bench->add_option("experiment", bench_opts.experiment, "spatial, temporal or compare")
      ->required()
      ->check(CLI::IsMember({"spatial", "temporal", "compare"}));
  bench->add_option("--config", bench_opts.config, "Experiment JSON")->required();
  bench->add_option("--bundle", bench_opts.bundle, "Dataset bundle (overrides the config)");
  bench->add_option("--seed", bench_opts.seed, "Single seed (overrides config seeds)");
  bench->add_option("--out", bench_opts.out, "Output directory")->required();
  bench->add_flag("--fast", bench_opts.fast, "100 random repetitions instead of 1000");
  bench->add_flag("--plots", bench_opts.plots, "Also write SVG charts");

  ReportOptions report_opts;
  auto* report = app.add_subcommand("report", "Summarize a report CSV");
  report->add_option("--in", report_opts.in, "report.csv")->required();
  report->add_flag("--plots", report_opts.plots, "Write <experiment>_<metric>.svg");
  report->add_option("--out", report_opts.out, "Plot directory (default: beside --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failed = &app;
    for (const CLI::App* sub : app.get_subcommands()) failed = sub;
    std::cerr << failed->help();
    return 2;
  }

  if (jobs) omp_set_num_threads(*jobs);
  try {
    if (validate->parsed()) return cmd_validate(validate_bundle, validate_outliers);
    if (synth->parsed()) return cmd_synth(synth_opts);
    if (place_cmd->parsed()) return cmd_place(place_opts);
    if (plan_cmd->parsed()) return cmd_plan(plan_opts);
    if (evaluate->parsed()) return cmd_evaluate(eval_opts);
    if (bench->parsed()) return cmd_bench(bench_opts);
    if (report->parsed()) return cmd_report(report_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error [configuration]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sensorplace
