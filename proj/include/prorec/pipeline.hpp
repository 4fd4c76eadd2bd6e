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

#ifndef PROREC_PIPELINE_HPP_
#define PROREC_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "prorec/core.hpp"
#include "prorec/denoise.hpp"
#include "prorec/transport.hpp"

namespace prorec {

enum class TransportKind { kSinkhorn, kRelaxedMax, kEmdSmall };
enum class ThresholdKind { kPersonalized, kGlobal, kNone };

std::string to_string(TransportKind kind);
std::string to_string(ThresholdKind kind);

struct ProRecConfig {
  double gamma = 0.1;
  double lambda = 0.5;
  double beta = 20.0;
  double zeta = 1e-3;
  Index dim = 64;
  int outer_max = 10;
  int als_epochs_per_outer = 10;
  double rel_tol = 1e-4;
  double init_scale = 0.1;
  TransportKind transport = TransportKind::kRelaxedMax;
  ThresholdKind threshold = ThresholdKind::kPersonalized;
  Index sigma = 10;  // used by ThresholdKind::kGlobal
  ScoreScope scope = ScoreScope::kPositives;
  SinkhornOptions sinkhorn;
  std::uint64_t seed = 42;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;            // L(X, U, V) after the embedding update
  double transport_objective = 0.0;  // sum_ij M_ij pi_ij
  Index relabeled_pairs = 0;         // positives whose value changed
  Index flagged_pairs = 0;           // positives with r < 0.5
  double seconds_embedding = 0.0;
  double seconds_transport = 0.0;
  double seconds_denoise = 0.0;
};

struct PipelineTrace {
  std::vector<IterationRecord> records;
  bool monotone_violation = false;

  std::vector<double> objectives() const;
};

// True iff |L_t - L_{t-1}| / max(L_{t-1}, eps) < rel_tol for the last two
// records. Fewer than two records never converge.
bool convergence_check(const PipelineTrace& trace, double rel_tol);

// Serializes one JSON object per line. Timing fields are omitted when
// `with_timing` is false.
void write_trace_jsonl(const PipelineTrace& trace, std::ostream& out,
                       bool with_timing = true);

// Replaces the default -U V^T cost, e.g. with a neural scorer's output.
using CostProvider = std::function<CostMatrix(const FactorModel&)>;

struct ProRecResult {
  FactorModel model;
  InteractionMatrix interactions;  // blended X after the last iteration
  DenoiseResult denoise;
  TransportPlan plan;
  PipelineTrace trace;
  bool converged = false;
};

// Alternates embedding updates with transport, thresholding, relabeling and
// blending until the relative objective change drops below rel_tol or
// outer_max iterations ran.
ProRecResult run_prorec(const InteractionMatrix& x0,
                        const Marginals& marginals, const ProRecConfig& config,
                        const CostProvider& cost_provider = {});

}  // namespace prorec

#endif  // PROREC_PIPELINE_HPP_
