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

#ifndef PROREC_EXPERIMENT_HPP_
#define PROREC_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prorec/config.hpp"
#include "prorec/data.hpp"
#include "prorec/eval.hpp"
#include "prorec/pipeline.hpp"

namespace prorec {

// Everything a run needs, derived from (config, seed, data).
struct PreparedData {
  Dataset dataset;
  InteractionMatrix clean_train;
  InteractionMatrix train;  // clean_train plus injected noise
  std::optional<InteractionMatrix> validation;
  std::optional<InteractionMatrix> test;
  NoiseLedger ledger;
  Marginals marginals;
};

// Seeds derived from the run seed so split, noise and model draws differ.
std::uint64_t split_seed(std::uint64_t seed);
std::uint64_t noise_seed(std::uint64_t seed);

Dataset load_dataset(const DatasetSpec& spec);
PreparedData prepare_data(const Dataset& dataset, const DatasetSpec& spec,
                          std::uint64_t seed);
PreparedData prepare_data(const ExperimentConfig& config);

struct RunOutcome {
  ProRecResult result;
  std::vector<MetricRow> test_metrics;
  std::vector<MetricRow> validation_metrics;
  std::optional<double> hit_ratio;  // only with injected noise
  std::optional<double> flag_rate;
  double seconds_total = 0.0;
};

RunOutcome run_experiment(const ExperimentConfig& config,
                          const PreparedData& data);

// Looks up a metric value; NaN when absent.
double metric_value(const std::vector<MetricRow>& rows,
                    const std::string& metric, Index k);

// Deterministic report: no wall-clock fields.
nlohmann::ordered_json report_json(const ExperimentConfig& config,
                                   const PreparedData& data,
                                   const RunOutcome& outcome);
nlohmann::ordered_json timing_json(const RunOutcome& outcome);

struct SweepRow {
  std::size_t grid_index = 0;
  std::vector<std::pair<std::string, double>> point;
  bool ok = false;
  std::string error;
  double selection_ndcg5 = 0.0;  // validation NDCG@5, or test without one
  double test_ndcg5 = 0.0;
  double test_recall5 = 0.0;
};

// Runs every grid point on the same prepared data and seed. Failed points are
// kept with ok = false and sort last. Sorted by selection_ndcg5 descending,
// ties in grid order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const PreparedData& data, const Grid& grid);

struct NoiseRow {
  double level = 0.0;
  std::uint64_t seed = 0;
  double hit_ratio = 0.0;
  double flag_rate = 0.0;
  double recall5_denoised = 0.0;
  double recall5_plain = 0.0;  // lambda = 1
};

// For each level and repeat r: seed + r drives split, noise and model.
std::vector<NoiseRow> run_noise_experiment(const ExperimentConfig& config,
                                           const Dataset& dataset,
                                           const std::vector<double>& levels,
                                           int repeats);

struct NoiseSummary {
  double level = 0.0;
  int runs = 0;
  double hit_ratio = 0.0;
  double flag_rate = 0.0;
  double recall5_denoised = 0.0;
  double recall5_plain = 0.0;
};

// Per-level means, levels in first-seen order.
std::vector<NoiseSummary> summarize(const std::vector<NoiseRow>& rows);

}  // namespace prorec

#endif  // PROREC_EXPERIMENT_HPP_
