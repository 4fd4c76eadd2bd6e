// Copyright 2026 The ProRec Authors.
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

// prorec: command-line front end for the denoising pipeline.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prorec/config.hpp"
#include "prorec/data.hpp"
#include "prorec/errors.hpp"
#include "prorec/eval.hpp"
#include "prorec/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace prorec;

namespace {

enum Exit { kOk = 0, kConfig = 1, kData = 2, kNumerical = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  int threads = 1;
  std::string format = "json";
};

// Names the step that was running when an exception escaped.
std::string g_phase = "startup";

ExperimentConfig load(const Options& opt) {
  g_phase = "config";
  ExperimentConfig cfg;
  if (!opt.config.empty()) {
    cfg = load_config(opt.config);
  } else {
    cfg = parse_config(nlohmann::json::object());
  }
  if (opt.seed) cfg.prorec.seed = *opt.seed;
  return cfg;
}

fs::path out_dir(const Options& opt) {
  fs::path dir(opt.out);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

void write_json(const fs::path& path, const ordered_json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

void write_metrics(const fs::path& dir, const std::string& stem,
                   const std::vector<MetricRow>& rows,
                   const std::string& format) {
  if (rows.empty()) return;
  if (format == "csv") {
    auto f = open_out(dir / (stem + ".csv"));
    write_metric_table_csv(rows, f);
  } else {
    ordered_json j = ordered_json::array();
    for (const auto& r : rows) {
      j.push_back({{"metric", r.metric},
                   {"k", r.k},
                   {"value", r.value},
                   {"n_users", r.n_users}});
    }
    write_json(dir / (stem + ".json"), j);
  }
}

int cmd_ingest(const Options& opt, const std::string& input) {
  ExperimentConfig cfg = load(opt);
  g_phase = "loading data";
  Dataset ds;
  if (!input.empty()) {
    ds = load_interactions(fs::path(resolve_data_path(input)));
  } else {
    ds = load_dataset(cfg.dataset);
  }
  const fs::path dir = out_dir(opt);
  g_phase = "writing artifacts";
  {
    auto f = open_out(dir / "interactions.tsv");
    write_interactions(ds, ds.interactions, f);
  }
  write_json(dir / "ingest.json",
             {{"name", ds.name},
              {"users", ds.interactions.n_users()},
              {"items", ds.interactions.n_items()},
              {"interactions", ds.interactions.nnz()},
              {"duplicates", ds.duplicates}});
  std::cout << ds.interactions.n_users() << " users, "
            << ds.interactions.n_items() << " items, "
            << ds.interactions.nnz() << " interactions -> "
            << (dir / "interactions.tsv").string() << '\n';
  return kOk;
}

int cmd_split(const Options& opt) {
  ExperimentConfig cfg = load(opt);
  if (cfg.dataset.split == "none") {
    throw ConfigError("config field 'dataset.split' is none; nothing to split");
  }
  g_phase = "loading data";
  const Dataset ds = load_dataset(cfg.dataset);
  g_phase = "splitting";
  const SplitScheme scheme = parse_split_scheme(cfg.dataset.split);
  const SplitResult split =
      split_random(ds.interactions, scheme, split_seed(cfg.prorec.seed));
  const fs::path dir = out_dir(opt);
  g_phase = "writing artifacts";
  {
    auto f = open_out(dir / "split_manifest.tsv");
    write_split_manifest(ds, ds.interactions, split, scheme, f);
  }
  static const char* kNames3[] = {"train", "validation", "test"};
  static const char* kNames2[] = {"train", "test"};
  for (std::size_t k = 0; k < split.folds.size(); ++k) {
    const char* name = split.folds.size() == 3 ? kNames3[k] : kNames2[k];
    auto f = open_out(dir / (std::string(name) + ".tsv"));
    write_interactions(ds, split.folds[k], f);
    std::cout << name << ": " << split.folds[k].nnz() << '\n';
  }
  return kOk;
}

int cmd_inject(const Options& opt, std::optional<double> ratio) {
  ExperimentConfig cfg = load(opt);
  if (ratio) cfg.dataset.noise_ratio = *ratio;
  if (cfg.dataset.noise_ratio <= 0.0) {
    throw ConfigError("noise ratio must be positive (set --ratio or "
                      "dataset.noise_ratio)");
  }
  g_phase = "loading data";
  const Dataset ds = load_dataset(cfg.dataset);
  g_phase = "injecting noise";
  const PreparedData data = prepare_data(ds, cfg.dataset, cfg.prorec.seed);
  const fs::path dir = out_dir(opt);
  g_phase = "writing artifacts";
  {
    auto f = open_out(dir / "noisy_train.tsv");
    write_interactions(ds, data.train, f);
  }
  {
    auto f = open_out(dir / "noise_ledger.tsv");
    write_ledger(ds, data.ledger, f);
  }
  std::cout << "injected " << data.ledger.injected.size()
            << " pairs into a train set of " << data.clean_train.nnz()
            << '\n';
  return kOk;
}

int cmd_run(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  g_phase = "loading data";
  const PreparedData data = prepare_data(cfg);
  g_phase = "pipeline";
  const RunOutcome outcome = run_experiment(cfg, data);
  const fs::path dir = out_dir(opt);
  g_phase = "writing artifacts";

  ordered_json report = report_json(cfg, data, outcome);
  std::vector<std::string> artifacts = {"report.json", "timing.json",
                                        "trace.jsonl", "case_table.csv"};
  {
    auto f = open_out(dir / "trace.jsonl");
    write_trace_jsonl(outcome.result.trace, f, false);
  }
  {
    auto f = open_out(dir / "case_table.csv");
    write_case_csv(outcome.result.denoise, data.train,
                   outcome.result.interactions, f, data.dataset.user_ids,
                   data.dataset.item_ids);
  }
  const std::string ext = opt.format == "csv" ? ".csv" : ".json";
  if (!outcome.test_metrics.empty()) {
    write_metrics(dir, "metrics_test", outcome.test_metrics, opt.format);
    artifacts.push_back("metrics_test" + ext);
  }
  if (!outcome.validation_metrics.empty()) {
    write_metrics(dir, "metrics_validation", outcome.validation_metrics,
                  opt.format);
    artifacts.push_back("metrics_validation" + ext);
  }
  report["artifacts"] = artifacts;
  write_json(dir / "report.json", report);
  write_json(dir / "timing.json", timing_json(outcome));

  const auto& records = outcome.result.trace.records;
  std::cout << "outer iterations: " << records.size()
            << (outcome.result.converged ? " (converged)" : "") << '\n';
  if (!records.empty()) {
    std::cout << "objective: " << records.front().objective << " -> "
              << records.back().objective << '\n';
  }
  for (const auto& r : outcome.test_metrics) {
    std::cout << "test " << r.metric << "@" << r.k << " = " << r.value
              << '\n';
  }
  if (outcome.hit_ratio) {
    std::cout << "noise hit ratio = " << *outcome.hit_ratio
              << ", flag rate = " << *outcome.flag_rate << '\n';
  }
  std::cout << "report: " << (dir / "report.json").string() << '\n';
  return kOk;
}

int cmd_sweep(const Options& opt, const std::string& grid_path) {
  const ExperimentConfig cfg = load(opt);
  Grid grid;
  if (grid_path.empty()) {
    grid = default_grid();
  } else {
    std::ifstream in(grid_path);
    if (!in) throw ConfigError("cannot open grid " + grid_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("grid " + grid_path + " is not valid JSON: " +
                        e.what());
    }
    grid = parse_grid(j);
  }
  g_phase = "loading data";
  const PreparedData data = prepare_data(cfg);
  g_phase = "sweep";
  const std::vector<SweepRow> rows = run_sweep(cfg, data, grid);
  const fs::path dir = out_dir(opt);
  g_phase = "writing artifacts";

  if (opt.format == "csv") {
    auto f = open_out(dir / "sweep.csv");
    f << "rank,grid_index";
    for (const auto& [name, values] : grid.axes) f << ',' << name;
    f << ",ok,selection_ndcg5,test_ndcg5,test_recall5,error\n";
    f.precision(10);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      f << r + 1 << ',' << rows[r].grid_index;
      for (const auto& [name, value] : rows[r].point) f << ',' << value;
      f << ',' << (rows[r].ok ? 1 : 0) << ',' << rows[r].selection_ndcg5
        << ',' << rows[r].test_ndcg5 << ',' << rows[r].test_recall5 << ",\""
        << rows[r].error << "\"\n";
    }
  } else {
    ordered_json table = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json point = ordered_json::object();
      for (const auto& [name, value] : row.point) point[name] = value;
      table.push_back({{"grid_index", row.grid_index},
                       {"point", point},
                       {"ok", row.ok},
                       {"selection_ndcg5", row.selection_ndcg5},
                       {"test_ndcg5", row.test_ndcg5},
                       {"test_recall5", row.test_recall5},
                       {"error", row.error}});
    }
    write_json(dir / "sweep.json", table);
  }
  if (!rows.empty() && rows.front().ok) {
    ExperimentConfig best = cfg;
    for (const auto& [key, value] : rows.front().point) {
      apply_grid_value(best.prorec, key, value);
    }
    write_json(dir / "best_config.json", best.to_json());
    std::cout << "best of " << rows.size() << " points:";
    for (const auto& [key, value] : rows.front().point) {
      std::cout << ' ' << key << '=' << value;
    }
    std::cout << " (ndcg@5 " << rows.front().selection_ndcg5 << ")\n";
  } else {
    std::cout << "every grid point failed\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_noise(const Options& opt, const std::vector<double>& levels,
              int repeats) {
  const ExperimentConfig cfg = load(opt);
  g_phase = "loading data";
  const Dataset ds = load_dataset(cfg.dataset);
  g_phase = "noise experiment";
  const std::vector<NoiseRow> rows =
      run_noise_experiment(cfg, ds, levels, repeats);
  const std::vector<NoiseSummary> summary = summarize(rows);
  const fs::path dir = out_dir(opt);
  g_phase = "writing artifacts";

  if (opt.format == "csv") {
    auto f = open_out(dir / "noise_experiment.csv");
    f.precision(10);
    f << "level,variant,runs,hit_ratio,flag_rate,recall5\n";
    for (const auto& s : summary) {
      f << s.level << ",denoised," << s.runs << ',' << s.hit_ratio << ','
        << s.flag_rate << ',' << s.recall5_denoised << '\n';
      f << s.level << ",plain," << s.runs << ",,," << s.recall5_plain << '\n';
    }
  } else {
    ordered_json j;
    ordered_json table = ordered_json::array();
    for (const auto& s : summary) {
      table.push_back({{"level", s.level},
                       {"runs", s.runs},
                       {"denoised", {{"hit_ratio", s.hit_ratio},
                                     {"flag_rate", s.flag_rate},
                                     {"recall5", s.recall5_denoised}}},
                       {"plain", {{"recall5", s.recall5_plain}}}});
    }
    ordered_json runs = ordered_json::array();
    for (const auto& r : rows) {
      runs.push_back({{"level", r.level},
                      {"seed", r.seed},
                      {"hit_ratio", r.hit_ratio},
                      {"flag_rate", r.flag_rate},
                      {"recall5_denoised", r.recall5_denoised},
                      {"recall5_plain", r.recall5_plain}});
    }
    j["summary"] = table;
    j["runs"] = runs;
    write_json(dir / "noise_experiment.json", j);
  }
  for (const auto& s : summary) {
    std::cout << "level " << s.level << ": HR " << s.hit_ratio
              << " (flag rate " << s.flag_rate << "), recall@5 denoised "
              << s.recall5_denoised << " vs plain " << s.recall5_plain
              << '\n';
  }
  return kOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

int cmd_export_case(const Options& opt, const std::string& run_dir,
                    const std::vector<std::string>& users) {
  g_phase = "reading run artifacts";
  const fs::path table = fs::path(run_dir) / "case_table.csv";
  std::ifstream in(table);
  if (!in) throw DataError("no case table at " + table.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw DataError("case table " + table.string() + " is empty");
  }
  const std::set<std::string> wanted(users.begin(), users.end());
  std::set<std::string> seen;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_csv_line(line);
    if (fields.empty()) continue;
    seen.insert(fields[0]);
    if (wanted.count(fields[0])) lines.push_back(line);
  }
  std::vector<std::string> unknown;
  for (const auto& u : users) {
    if (!seen.count(u)) unknown.push_back(u);
  }
  if (!unknown.empty()) {
    std::cerr << "skipping unknown users:";
    for (const auto& u : unknown) std::cerr << ' ' << u;
    std::cerr << '\n';
  }

  const fs::path dir = out_dir(opt);
  g_phase = "writing artifacts";
  if (opt.format == "csv") {
    auto f = open_out(dir / "case_export.csv");
    f << header << '\n';
    for (const auto& l : lines) f << l << '\n';
  } else {
    const auto names = split_csv_line(header);
    ordered_json rows = ordered_json::array();
    for (const auto& l : lines) {
      const auto fields = split_csv_line(l);
      ordered_json row;
      for (std::size_t k = 0; k < names.size() && k < fields.size(); ++k) {
        if (k < 2) {
          row[names[k]] = fields[k];
        } else {
          row[names[k]] = std::stod(fields[k]);
        }
      }
      rows.push_back(row);
    }
    write_json(dir / "case_export.json", {{"rows", rows},
                                          {"skipped_users", unknown}});
  }
  std::cout << lines.size() << " rows for " << users.size() - unknown.size()
            << " users\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prorec: optimal-transport denoising for implicit feedback"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON experiment config");
    sub->add_option("--seed", opt.seed, "Override the config seed");
    sub->add_option("--out", opt.out, "Output directory")
        ->capture_default_str();
    sub->add_option("--threads", opt.threads, "Worker threads for dense "
                    "linear algebra")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--format", opt.format, "Table format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
  };

  std::string input;
  auto* ingest = app.add_subcommand("ingest", "Load and normalize a TSV "
                                    "interaction file");
  add_common(ingest);
  ingest->add_option("--input", input, "TSV file (user item [value])");

  auto* split = app.add_subcommand("split", "Write train/validation/test "
                                   "folds");
  add_common(split);

  std::optional<double> ratio;
  auto* inject = app.add_subcommand("inject-noise", "Add random absent pairs "
                                    "to the train fold");
  add_common(inject);
  inject->add_option("--ratio", ratio, "Noise ratio in (0, 1)");

  auto* run = app.add_subcommand("run", "Run the pipeline and evaluate");
  add_common(run);

  std::string grid_path;
  auto* sweep = app.add_subcommand("sweep", "Grid search over "
                                   "hyperparameters");
  add_common(sweep);
  sweep->add_option("--grid", grid_path,
                    "JSON grid {name: [values]}; default gamma x lambda x "
                    "beta");

  std::vector<double> levels{0.05, 0.10, 0.15, 0.20};
  int repeats = 5;
  auto* noise = app.add_subcommand("noise-experiment", "Hit ratio and "
                                   "recall per noise level");
  add_common(noise);
  noise->add_option("--levels", levels, "Noise levels")
      ->delimiter(',')
      ->capture_default_str();
  noise->add_option("--repeats", repeats, "Seeds per level")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string run_dir;
  std::vector<std::string> users;
  auto* export_case = app.add_subcommand("export-case", "Per-user relabel "
                                         "rows from a finished run");
  add_common(export_case);
  export_case->add_option("--run", run_dir, "Directory written by `run`")
      ->required();
  export_case->add_option("--users", users, "User ids")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  Eigen::setNbThreads(opt.threads);
  try {
    if (*ingest) return cmd_ingest(opt, input);
    if (*split) return cmd_split(opt);
    if (*inject) return cmd_inject(opt, ratio);
    if (*run) return cmd_run(opt);
    if (*sweep) return cmd_sweep(opt, grid_path);
    if (*noise) return cmd_noise(opt, levels, repeats);
    if (*export_case) return cmd_export_case(opt, run_dir, users);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const UnsupportedSizeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error (" << g_phase << "): " << e.what() << '\n';
    return kData;
  } catch (const DataError& e) {
    std::cerr << "data error (" << g_phase << "): " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "numerical error (" << g_phase << "): " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
