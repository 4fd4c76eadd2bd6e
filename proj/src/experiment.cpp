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

#include "prorec/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <iterator>

#include "prorec/errors.hpp"

namespace prorec {

using nlohmann::ordered_json;

std::uint64_t split_seed(std::uint64_t seed) {
  return seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL;
}

std::uint64_t noise_seed(std::uint64_t seed) {
  return seed * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL;
}

Dataset load_dataset(const DatasetSpec& spec) {
  if (!spec.path.empty()) return load_interactions(resolve_data_path(spec.path));
  const SyntheticSpec syn = spec.synthetic.value_or(SyntheticSpec{});
  return generate_planted(syn.users, syn.items, syn.communities, syn.density,
                          syn.seed);
}

PreparedData prepare_data(const Dataset& dataset, const DatasetSpec& spec,
                          std::uint64_t seed) {
  PreparedData out;
  out.dataset = dataset;
  if (spec.split == "none") {
    out.clean_train = dataset.interactions;
  } else {
    const SplitScheme scheme = parse_split_scheme(spec.split);
    SplitResult split = split_random(dataset.interactions, scheme,
                                     split_seed(seed));
    out.clean_train = std::move(split.folds.front());
    out.test = std::move(split.folds.back());
    if (scheme == SplitScheme::kTrainValTest523) {
      out.validation = std::move(split.folds[1]);
    }
  }
  if (spec.noise_ratio > 0.0) {
    auto [noisy, ledger] =
        inject_noise(out.clean_train, spec.noise_ratio, noise_seed(seed));
    out.train = std::move(noisy);
    out.ledger = std::move(ledger);
  } else {
    out.train = out.clean_train;
  }
  out.marginals = popularity_marginals(out.train);
  return out;
}

PreparedData prepare_data(const ExperimentConfig& config) {
  return prepare_data(load_dataset(config.dataset), config.dataset,
                      config.prorec.seed);
}

namespace {

InteractionMatrix merge(const InteractionMatrix& a,
                        const InteractionMatrix& b) {
  auto pairs = a.pairs();
  const auto more = b.pairs();
  pairs.insert(pairs.end(), more.begin(), more.end());
  return InteractionMatrix::from_pairs(a.n_users(), a.n_items(), pairs);
}

ordered_json metrics_json(const std::vector<MetricRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) {
    out.push_back({{"metric", r.metric},
                   {"k", r.k},
                   {"value", r.value},
                   {"n_users", r.n_users}});
  }
  return out;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config,
                          const PreparedData& data) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  out.result = run_prorec(data.train, data.marginals, config.prorec);

  const Matrix scores = predict_scores(out.result.model);
  // The model saw the noisy train set; those pairs are never recommended.
  if (data.validation) {
    out.validation_metrics = evaluate_ranking(scores, data.train,
                                              *data.validation, config.cutoffs);
  }
  if (data.test) {
    const InteractionMatrix seen =
        data.validation ? merge(data.train, *data.validation) : data.train;
    out.test_metrics =
        evaluate_ranking(scores, seen, *data.test, config.cutoffs);
  }
  if (!data.ledger.injected.empty() &&
      config.prorec.threshold != ThresholdKind::kNone) {
    out.hit_ratio = noise_hit_ratio(out.result.denoise, data.ledger);
    out.flag_rate = flag_rate(out.result.denoise, data.ledger);
  }
  out.seconds_total = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return out;
}

double metric_value(const std::vector<MetricRow>& rows,
                    const std::string& metric, Index k) {
  for (const auto& r : rows) {
    if (r.metric == metric && r.k == k) return r.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

ordered_json report_json(const ExperimentConfig& config,
                         const PreparedData& data, const RunOutcome& outcome) {
  ordered_json j;
  j["seed"] = config.prorec.seed;
  j["config"] = config.to_json();
  j["data"] = {{"name", data.dataset.name},
               {"users", data.train.n_users()},
               {"items", data.train.n_items()},
               {"interactions", data.dataset.interactions.nnz()},
               {"train", data.clean_train.nnz()},
               {"validation", data.validation ? data.validation->nnz() : 0},
               {"test", data.test ? data.test->nnz() : 0},
               {"injected_noise",
                static_cast<Index>(data.ledger.injected.size())},
               {"patched_users", data.marginals.patched_users},
               {"patched_items", data.marginals.patched_items}};

  ordered_json trace = ordered_json::array();
  for (const auto& r : outcome.result.trace.records) {
    trace.push_back({{"iteration", r.iteration},
                     {"objective", r.objective},
                     {"transport_objective", r.transport_objective},
                     {"relabeled_pairs", r.relabeled_pairs},
                     {"flagged_pairs", r.flagged_pairs}});
  }
  j["trace"] = trace;
  j["converged"] = outcome.result.converged;
  j["monotone_violation"] = outcome.result.trace.monotone_violation;
  j["plan"] = {{"kind", to_string(outcome.result.plan.kind)},
               {"iterations", outcome.result.plan.iterations},
               {"converged", outcome.result.plan.converged},
               {"log_domain", outcome.result.plan.log_domain}};
  j["metrics"] = {{"validation", metrics_json(outcome.validation_metrics)},
                  {"test", metrics_json(outcome.test_metrics)}};
  if (outcome.hit_ratio) {
    j["noise"] = {{"hit_ratio", *outcome.hit_ratio},
                  {"flag_rate", *outcome.flag_rate}};
  }
  return j;
}

ordered_json timing_json(const RunOutcome& outcome) {
  ordered_json j;
  j["seconds_total"] = outcome.seconds_total;
  ordered_json per = ordered_json::array();
  for (const auto& r : outcome.result.trace.records) {
    per.push_back({{"iteration", r.iteration},
                   {"embedding", r.seconds_embedding},
                   {"transport", r.seconds_transport},
                   {"denoise", r.seconds_denoise}});
  }
  j["iterations"] = per;
  return j;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const PreparedData& data, const Grid& grid) {
  if (grid.size() == 0) throw ConfigError("grid is empty");
  std::vector<SweepRow> rows(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    SweepRow& row = rows[k];
    row.grid_index = k;
    row.point = grid.point(k);
    try {
      ExperimentConfig point = config;
      for (const auto& [key, value] : row.point) {
        apply_grid_value(point.prorec, key, value);
      }
      point.prorec.validate();
      const RunOutcome outcome = run_experiment(point, data);
      row.test_ndcg5 = metric_value(outcome.test_metrics, "ndcg", 5);
      row.test_recall5 = metric_value(outcome.test_metrics, "recall", 5);
      row.selection_ndcg5 =
          data.validation ? metric_value(outcome.validation_metrics, "ndcg", 5)
                          : row.test_ndcg5;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      warn("sweep point " + std::to_string(k) + " failed: " + e.what());
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     if (a.ok != b.ok) return a.ok;
                     const double x = std::isnan(a.selection_ndcg5)
                                          ? -1.0 : a.selection_ndcg5;
                     const double y = std::isnan(b.selection_ndcg5)
                                          ? -1.0 : b.selection_ndcg5;
                     return x > y;
                   });
  return rows;
}

std::vector<NoiseRow> run_noise_experiment(const ExperimentConfig& config,
                                           const Dataset& dataset,
                                           const std::vector<double>& levels,
                                           int repeats) {
  if (levels.empty()) throw ConfigError("noise levels are empty");
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw ConfigError("noise level must lie in (0, 1)");
    }
  }
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (config.dataset.split == "none") {
    throw ConfigError("noise experiment needs a held-out split");
  }
  ExperimentConfig cutoff5 = config;
  cutoff5.cutoffs = {5};

  std::vector<NoiseRow> rows;
  for (double level : levels) {
    for (int r = 0; r < repeats; ++r) {
      ExperimentConfig run = cutoff5;
      run.prorec.seed = config.prorec.seed + static_cast<std::uint64_t>(r);
      run.dataset.noise_ratio = level;
      const PreparedData data =
          prepare_data(dataset, run.dataset, run.prorec.seed);

      NoiseRow row;
      row.level = level;
      row.seed = run.prorec.seed;
      const RunOutcome denoised = run_experiment(run, data);
      row.hit_ratio = denoised.hit_ratio.value_or(0.0);
      row.flag_rate = denoised.flag_rate.value_or(0.0);
      row.recall5_denoised = metric_value(denoised.test_metrics, "recall", 5);

      run.prorec.lambda = 1.0;
      const RunOutcome plain = run_experiment(run, data);
      row.recall5_plain = metric_value(plain.test_metrics, "recall", 5);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<NoiseSummary> summarize(const std::vector<NoiseRow>& rows) {
  std::vector<NoiseSummary> out;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) {
      return s.level == row.level;
    });
    if (it == out.end()) {
      out.push_back(NoiseSummary{row.level});
      it = std::prev(out.end());
    }
    ++it->runs;
    it->hit_ratio += row.hit_ratio;
    it->flag_rate += row.flag_rate;
    it->recall5_denoised += row.recall5_denoised;
    it->recall5_plain += row.recall5_plain;
  }
  for (auto& s : out) {
    s.hit_ratio /= s.runs;
    s.flag_rate /= s.runs;
    s.recall5_denoised /= s.runs;
    s.recall5_plain /= s.runs;
  }
  return out;
}

}  // namespace prorec
