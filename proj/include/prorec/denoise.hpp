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

#ifndef PROREC_DENOISE_HPP_
#define PROREC_DENOISE_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "prorec/core.hpp"

namespace prorec {

// Which items a user's plan row is normalized and split over.
enum class ScoreScope { kPositives, kAllItems };

std::string to_string(ScoreScope scope);

// Soft relabel weights on positive pairs, r in [0, 1].
class RelabelMatrix {
 public:
  RelabelMatrix() = default;
  RelabelMatrix(Index n_users, Index n_items);

  Index n_users() const { return static_cast<Index>(rows_.size()); }
  Index n_items() const { return n_items_; }
  void set(Index user, Index item, double r);
  // Pairs without a stored weight read as 1 (kept as is).
  double get(Index user, Index item) const;
  bool contains(Index user, Index item) const;
  std::span<const Entry> row(Index user) const { return rows_[user]; }
  Index size() const;
  // Pairs with r < 0.5.
  Index count_below_half() const;

 private:
  Index n_items_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

struct UserScores {
  std::vector<Index> items;    // scored item set, ascending
  std::vector<double> scores;  // plan row over `items`, normalized to sum 1
  bool degenerate = false;
};

struct UserSplit {
  Index split_index = 1;  // kappa: number of top-ranked items kept
  double threshold = 0.0;
  bool degenerate = false;
};

struct DenoiseResult {
  std::vector<UserScores> scores;
  std::vector<UserSplit> splits;
  RelabelMatrix relabel;
};

// Divides a row by its sum. Throws DegenerateUserError on a nonpositive sum.
std::vector<double> normalize_row(std::span<const double> row);

// Normalized plan rows restricted to each user's scope. Users whose scoped
// mass is zero are flagged degenerate (with a warning) instead of throwing.
std::vector<UserScores> normalize_rows(const Matrix& pi,
                                       const InteractionMatrix& x,
                                       ScoreScope scope);

struct RankedScores {
  std::vector<double> sorted;   // descending
  std::vector<Index> order;     // sorted[k] == scores[order[k]]
};

// Descending sort; ties keep the original (ascending item) order.
RankedScores rank_user(std::span<const double> scores);

// SSE of the two-segment split for eta = 1 .. n-1 (entry eta-1), from prefix
// sums of x and x^2.
std::vector<double> split_sse(std::span<const double> sorted);

// argmin over eta of split_sse, smallest eta on ties. Throws
// DegenerateUserError for fewer than two values.
Index cart_split(std::span<const double> sorted);

// The kappa-th largest score (1-based).
double threshold_at(std::span<const double> sorted, Index kappa);

// Per-user split and threshold; degenerate users get kappa = 1.
std::vector<UserSplit> personalized_thresholds(
    std::span<const UserScores> scores);

// 1 / (1 + exp(-beta (score - threshold))).
double relabel_value(double score, double threshold, double beta);

// Sigmoid relabel of every positive of `x`. Users with a single positive, or
// flagged degenerate, keep r = 1.
RelabelMatrix relabel(std::span<const UserScores> scores,
                      std::span<const UserSplit> splits,
                      const InteractionMatrix& x, double beta);

// Normalize, rank, split and relabel in one pass.
DenoiseResult personalized_denoise(const Matrix& pi,
                                   const InteractionMatrix& x, double beta,
                                   ScoreScope scope = ScoreScope::kPositives);

// Top-sigma positives per user by plan mass get r = 1, the rest r = 0.
DenoiseResult global_threshold_denoise(const Matrix& pi,
                                       const InteractionMatrix& x,
                                       Index sigma);

// x <- lambda x + (1 - lambda) r x on stored entries; zeros stay zero.
InteractionMatrix blend(const InteractionMatrix& x, const RelabelMatrix& r,
                        double lambda);

// One row per positive of `original`:
// user,item,original,normalized_score,threshold,r,blended
void write_case_csv(const DenoiseResult& result,
                    const InteractionMatrix& original,
                    const InteractionMatrix& blended, std::ostream& out,
                    std::span<const std::string> user_ids = {},
                    std::span<const std::string> item_ids = {});

}  // namespace prorec

#endif  // PROREC_DENOISE_HPP_
