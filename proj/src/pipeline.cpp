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

#include "prorec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include "json.hpp"

#include "prorec/errors.hpp"
#include "prorec/factorization.hpp"

namespace prorec {

std::string to_string(TransportKind kind) {
  switch (kind) {
    case TransportKind::kSinkhorn: return "sinkhorn";
    case TransportKind::kRelaxedMax: return "relaxed-max";
    case TransportKind::kEmdSmall: return "emd-small";
  }
  return "unknown";
}

std::string to_string(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::kPersonalized: return "personalized";
    case ThresholdKind::kGlobal: return "global";
    case ThresholdKind::kNone: return "none";
  }
  return "unknown";
}

void ProRecConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& rule) {
    throw ConfigError("config field '" + field + "' " + rule);
  };
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("gamma", "must be > 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda", "must lie in [0, 1]");
  if (!(beta > 0.0)) fail("beta", "must be > 0");
  if (!(zeta >= 0.0)) fail("zeta", "must be >= 0");
  if (dim < 1) fail("dim", "must be >= 1");
  if (outer_max < 1) fail("outer_max", "must be >= 1");
  if (als_epochs_per_outer < 1) fail("als_epochs_per_outer", "must be >= 1");
  if (!(rel_tol >= 0.0)) fail("rel_tol", "must be >= 0");
  if (!(init_scale > 0.0)) fail("init_scale", "must be > 0");
  if (sigma < 1) fail("sigma", "must be >= 1");
  if (sinkhorn.max_iters < 1) fail("sinkhorn.max_iters", "must be >= 1");
  if (!(sinkhorn.tol > 0.0)) fail("sinkhorn.tol", "must be > 0");
}

std::vector<double> PipelineTrace::objectives() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.objective);
  return out;
}

bool convergence_check(const PipelineTrace& trace, double rel_tol) {
  const auto n = trace.records.size();
  if (n < 2) return false;
  const double prev = trace.records[n - 2].objective;
  const double cur = trace.records[n - 1].objective;
  constexpr double kFloor = 1e-300;
  return std::abs(cur - prev) / std::max(prev, kFloor) < rel_tol;
}

void write_trace_jsonl(const PipelineTrace& trace, std::ostream& out,
                       bool with_timing) {
  for (const auto& r : trace.records) {
    nlohmann::ordered_json j;
    j["iteration"] = r.iteration;
    j["objective"] = r.objective;
    j["transport_objective"] = r.transport_objective;
    j["relabeled_pairs"] = r.relabeled_pairs;
    j["flagged_pairs"] = r.flagged_pairs;
    if (with_timing) {
      j["seconds_embedding"] = r.seconds_embedding;
      j["seconds_transport"] = r.seconds_transport;
      j["seconds_denoise"] = r.seconds_denoise;
    }
    out << j.dump() << '\n';
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

TransportPlan compute_plan(const CostMatrix& cost, const Marginals& marginals,
                           const ProRecConfig& config) {
  switch (config.transport) {
    case TransportKind::kSinkhorn:
      return sinkhorn(cost, marginals, config.gamma, config.sinkhorn);
    case TransportKind::kRelaxedMax:
      return relaxed_plan(cost, marginals, config.gamma);
    case TransportKind::kEmdSmall:
      return emd_exact_small(cost, marginals);
  }
  throw ConfigError("unknown transport kind");
}

Index count_changed(const InteractionMatrix& before,
                    const InteractionMatrix& after) {
  Index changed = 0;
  for (Index u = 0; u < before.n_users(); ++u) {
    for (const auto& e : before.row(u)) {
      if (after.get(u, e.item) != e.value) ++changed;
    }
  }
  return changed;
}

}  // namespace

ProRecResult run_prorec(const InteractionMatrix& x0,
                        const Marginals& marginals, const ProRecConfig& config,
                        const CostProvider& cost_provider) {
  config.validate();
  if (x0.nnz() == 0) throw DataError("interaction matrix has no positives");
  if (marginals.users.size() != x0.n_users() ||
      marginals.items.size() != x0.n_items()) {
    throw ShapeError("marginals do not match the interaction matrix");
  }
  marginals.validate();

  AlsSettings als;
  als.n_epochs = config.als_epochs_per_outer;
  als.zeta = config.zeta;
  als.seed = config.seed;
  als.init_scale = config.init_scale;

  ProRecResult result;
  result.model = init_model(x0.n_users(), x0.n_items(), config.dim, als);
  result.interactions = x0;
  PipelineTrace& trace = result.trace;

  for (int t = 1; t <= config.outer_max; ++t) {
    IterationRecord record;
    record.iteration = t;
    const InteractionMatrix& x = result.interactions;

    auto start = Clock::now();
    for (int e = 0; e < config.als_epochs_per_outer; ++e) {
      result.model = als_epoch(result.model, x);
    }
    record.objective = objective(result.model, x);
    record.seconds_embedding = seconds_since(start);

    if (!trace.records.empty()) {
      const double slack = 1e-8 * trace.records.front().objective;
      if (record.objective > trace.records.back().objective + slack) {
        trace.monotone_violation = true;
        warn("objective increased at outer iteration " + std::to_string(t) +
             ": " + std::to_string(trace.records.back().objective) + " -> " +
             std::to_string(record.objective));
      }
    }

    start = Clock::now();
    CostMatrix cost =
        cost_provider ? cost_provider(result.model) : cost_matrix(result.model);
    if (cost.rows() != x.n_users() || cost.cols() != x.n_items()) {
      throw ShapeError("cost provider returned a wrongly shaped matrix");
    }
    result.plan = compute_plan(cost, marginals, config);
    record.transport_objective = transport_cost(cost, result.plan.pi);
    record.seconds_transport = seconds_since(start);

    start = Clock::now();
    switch (config.threshold) {
      case ThresholdKind::kPersonalized:
        result.denoise = personalized_denoise(result.plan.pi, x, config.beta,
                                              config.scope);
        break;
      case ThresholdKind::kGlobal:
        result.denoise =
            global_threshold_denoise(result.plan.pi, x, config.sigma);
        break;
      case ThresholdKind::kNone:
        result.denoise = DenoiseResult{};
        result.denoise.scores =
            normalize_rows(result.plan.pi, x, config.scope);
        result.denoise.splits.resize(result.denoise.scores.size());
        result.denoise.relabel = RelabelMatrix(x.n_users(), x.n_items());
        break;
    }
    record.flagged_pairs = result.denoise.relabel.count_below_half();
    if (config.threshold != ThresholdKind::kNone) {
      InteractionMatrix next =
          blend(x, result.denoise.relabel, config.lambda);
      record.relabeled_pairs = count_changed(x, next);
      result.interactions = std::move(next);
    }
    record.seconds_denoise = seconds_since(start);

    trace.records.push_back(record);
    if (convergence_check(trace, config.rel_tol)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace prorec
