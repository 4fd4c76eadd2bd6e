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

#ifndef PROREC_EVAL_HPP_
#define PROREC_EVAL_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "prorec/core.hpp"
#include "prorec/data.hpp"
#include "prorec/denoise.hpp"

namespace prorec {

// Per-user candidate lists, best first.
struct RankedList {
  std::vector<std::vector<Index>> items;
  Index k = 0;
};

// Top-k items per user by descending score (ties by ascending item index),
// skipping every pair stored in `exclude`. Users with fewer than k candidates
// get a shorter list and a warning.
RankedList rank_items(const Matrix& scores, const InteractionMatrix& exclude,
                      Index k);

using Truth = std::vector<std::vector<Index>>;

// Relevant items per user from the stored pairs of `x`.
Truth truth_from(const InteractionMatrix& x);

struct MetricValue {
  double value = 0.0;
  Index n_users = 0;  // users with nonempty truth that were averaged
};

// All three macro-average over users with nonempty truth; binary relevance.
MetricValue recall_at_k(const RankedList& ranked, const Truth& truth, Index k);
MetricValue ndcg_at_k(const RankedList& ranked, const Truth& truth, Index k);
MetricValue map_at_k(const RankedList& ranked, const Truth& truth, Index k);

enum class HitRatioMode {
  kBelowThreshold,  // flagged = positives with r < 0.5
  kLowestScores,    // flagged = |injected| positives with the smallest r
};

// Fraction of injected pairs that the denoiser flagged. Throws DataError for
// an empty ledger.
double noise_hit_ratio(const DenoiseResult& result, const NoiseLedger& ledger,
                       HitRatioMode mode = HitRatioMode::kBelowThreshold);

// Fraction of relabeled positives that count as flagged under `mode`; the
// expected hit ratio of random flagging at the same rate.
double flag_rate(const DenoiseResult& result, const NoiseLedger& ledger,
                 HitRatioMode mode = HitRatioMode::kBelowThreshold);

struct MetricRow {
  std::string metric;
  Index k = 0;
  double value = 0.0;
  Index n_users = 0;
};

// Recall/NDCG/MAP rows for every cutoff.
std::vector<MetricRow> evaluate_ranking(const Matrix& scores,
                                        const InteractionMatrix& train,
                                        const InteractionMatrix& heldout,
                                        const std::vector<Index>& cutoffs);

void write_metric_table_csv(const std::vector<MetricRow>& rows,
                            std::ostream& out);

}  // namespace prorec

#endif  // PROREC_EVAL_HPP_
