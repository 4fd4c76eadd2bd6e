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

#include "prorec/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "prorec/errors.hpp"

namespace prorec {

std::string to_string(ScoreScope scope) {
  return scope == ScoreScope::kPositives ? "positives" : "all";
}

RelabelMatrix::RelabelMatrix(Index n_users, Index n_items)
    : n_items_(n_items), rows_(static_cast<std::size_t>(n_users)) {}

namespace {
auto find_entry(std::vector<Entry>& row, Index item) {
  return std::lower_bound(
      row.begin(), row.end(), item,
      [](const Entry& e, Index target) { return e.item < target; });
}
}  // namespace

void RelabelMatrix::set(Index user, Index item, double r) {
  if (user < 0 || user >= n_users() || item < 0 || item >= n_items_) {
    throw std::out_of_range("relabel index out of range");
  }
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument("relabel weight must lie in [0, 1]");
  }
  auto& row = rows_[static_cast<std::size_t>(user)];
  auto it = find_entry(row, item);
  if (it != row.end() && it->item == item) {
    it->value = r;
  } else {
    row.insert(it, Entry{item, r});
  }
}

double RelabelMatrix::get(Index user, Index item) const {
  const auto& row = rows_[static_cast<std::size_t>(user)];
  auto it = std::lower_bound(
      row.begin(), row.end(), item,
      [](const Entry& e, Index target) { return e.item < target; });
  return (it != row.end() && it->item == item) ? it->value : 1.0;
}

bool RelabelMatrix::contains(Index user, Index item) const {
  const auto& row = rows_[static_cast<std::size_t>(user)];
  return std::binary_search(
      row.begin(), row.end(), Entry{item, 0.0},
      [](const Entry& a, const Entry& b) { return a.item < b.item; });
}

Index RelabelMatrix::size() const {
  Index n = 0;
  for (const auto& r : rows_) n += static_cast<Index>(r.size());
  return n;
}

Index RelabelMatrix::count_below_half() const {
  Index n = 0;
  for (const auto& r : rows_) {
    for (const auto& e : r) n += e.value < 0.5 ? 1 : 0;
  }
  return n;
}

std::vector<double> normalize_row(std::span<const double> row) {
  double total = 0.0;
  for (double v : row) total += v;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateUserError("scored row has no positive mass");
  }
  std::vector<double> out(row.begin(), row.end());
  for (double& v : out) v /= total;
  return out;
}

std::vector<UserScores> normalize_rows(const Matrix& pi,
                                       const InteractionMatrix& x,
                                       ScoreScope scope) {
  if (pi.rows() != x.n_users() || pi.cols() != x.n_items()) {
    throw ShapeError("plan shape does not match the interaction matrix");
  }
  std::vector<UserScores> out(static_cast<std::size_t>(x.n_users()));
  for (Index u = 0; u < x.n_users(); ++u) {
    UserScores& us = out[static_cast<std::size_t>(u)];
    if (scope == ScoreScope::kPositives) {
      us.items = x.row_items(u);
    } else {
      us.items.resize(static_cast<std::size_t>(x.n_items()));
      std::iota(us.items.begin(), us.items.end(), Index{0});
    }
    if (us.items.empty()) {
      us.degenerate = true;
      continue;
    }
    std::vector<double> raw;
    raw.reserve(us.items.size());
    for (Index i : us.items) raw.push_back(pi(u, i));
    try {
      us.scores = normalize_row(raw);
    } catch (const DegenerateUserError&) {
      warn("user " + std::to_string(u) +
           " has zero plan mass over its scored items; left unrelabeled");
      us.degenerate = true;
      us.scores.assign(raw.size(), 1.0 / static_cast<double>(raw.size()));
    }
  }
  return out;
}

RankedScores rank_user(std::span<const double> scores) {
  RankedScores ranked;
  ranked.order.resize(scores.size());
  std::iota(ranked.order.begin(), ranked.order.end(), Index{0});
  std::stable_sort(ranked.order.begin(), ranked.order.end(),
                   [&](Index a, Index b) { return scores[a] > scores[b]; });
  ranked.sorted.reserve(scores.size());
  for (Index k : ranked.order) ranked.sorted.push_back(scores[k]);
  return ranked;
}

std::vector<double> split_sse(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  if (n < 2) return {};
  // Centering first keeps the prefix-sum differences well conditioned.
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                      static_cast<double>(n);
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = sorted[k] - mean;
    s1[k + 1] = s1[k] + c;
    s2[k + 1] = s2[k] + c * c;
  }
  std::vector<double> sse(n - 1);
  for (std::size_t eta = 1; eta < n; ++eta) {
    const double left_n = static_cast<double>(eta);
    const double right_n = static_cast<double>(n - eta);
    const double left_sum = s1[eta];
    const double right_sum = s1[n] - s1[eta];
    const double left = s2[eta] - left_sum * left_sum / left_n;
    const double right = (s2[n] - s2[eta]) - right_sum * right_sum / right_n;
    sse[eta - 1] = std::max(left, 0.0) + std::max(right, 0.0);
  }
  return sse;
}

Index cart_split(std::span<const double> sorted) {
  if (sorted.size() < 2) {
    throw DegenerateUserError("split needs at least two scores");
  }
  const std::vector<double> sse = split_sse(sorted);
  // SSE values within rounding of the minimum count as ties.
  double scale = 0.0;
  for (double v : sorted) scale += v * v;
  const double tie = 1e-12 * scale;
  const double best = *std::min_element(sse.begin(), sse.end());
  for (std::size_t k = 0; k < sse.size(); ++k) {
    if (sse[k] <= best + tie) return static_cast<Index>(k + 1);
  }
  return 1;
}

double threshold_at(std::span<const double> sorted, Index kappa) {
  if (kappa < 1 || kappa > static_cast<Index>(sorted.size())) {
    throw std::out_of_range("split index outside the score vector");
  }
  return sorted[static_cast<std::size_t>(kappa - 1)];
}

std::vector<UserSplit> personalized_thresholds(
    std::span<const UserScores> scores) {
  std::vector<UserSplit> splits(scores.size());
  for (std::size_t u = 0; u < scores.size(); ++u) {
    const UserScores& us = scores[u];
    UserSplit& split = splits[u];
    if (us.degenerate || us.scores.empty()) {
      split.degenerate = true;
      continue;
    }
    const RankedScores ranked = rank_user(us.scores);
    if (ranked.sorted.size() < 2) {
      split.degenerate = true;
      split.split_index = 1;
      split.threshold = ranked.sorted.front();
      continue;
    }
    split.split_index = cart_split(ranked.sorted);
    split.threshold = threshold_at(ranked.sorted, split.split_index);
  }
  return splits;
}

double relabel_value(double score, double threshold, double beta) {
  return 1.0 / (1.0 + std::exp(-beta * (score - threshold)));
}

RelabelMatrix relabel(std::span<const UserScores> scores,
                      std::span<const UserSplit> splits,
                      const InteractionMatrix& x, double beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (static_cast<Index>(scores.size()) != x.n_users() ||
      splits.size() != scores.size()) {
    throw ShapeError("per-user score and split counts must match users");
  }
  RelabelMatrix r(x.n_users(), x.n_items());
  for (Index u = 0; u < x.n_users(); ++u) {
    const UserScores& us = scores[static_cast<std::size_t>(u)];
    const UserSplit& split = splits[static_cast<std::size_t>(u)];
    const auto positives = x.row(u);
    if (positives.size() < 2 || split.degenerate || us.degenerate) {
      for (const auto& e : positives) r.set(u, e.item, 1.0);
      continue;
    }
    // Both index lists are ascending, so walk them together.
    std::size_t k = 0;
    for (const auto& e : positives) {
      while (k < us.items.size() && us.items[k] < e.item) ++k;
      if (k == us.items.size() || us.items[k] != e.item) {
        throw std::logic_error("positive item missing from scored set");
      }
      r.set(u, e.item, relabel_value(us.scores[k], split.threshold, beta));
    }
  }
  return r;
}

DenoiseResult personalized_denoise(const Matrix& pi,
                                   const InteractionMatrix& x, double beta,
                                   ScoreScope scope) {
  DenoiseResult result;
  result.scores = normalize_rows(pi, x, scope);
  result.splits = personalized_thresholds(result.scores);
  result.relabel = relabel(result.scores, result.splits, x, beta);
  return result;
}

DenoiseResult global_threshold_denoise(const Matrix& pi,
                                       const InteractionMatrix& x,
                                       Index sigma) {
  if (sigma < 1) throw ConfigError("global threshold sigma must be >= 1");
  DenoiseResult result;
  result.scores = normalize_rows(pi, x, ScoreScope::kPositives);
  result.splits.resize(result.scores.size());
  result.relabel = RelabelMatrix(x.n_users(), x.n_items());
  for (Index u = 0; u < x.n_users(); ++u) {
    const UserScores& us = result.scores[static_cast<std::size_t>(u)];
    UserSplit& split = result.splits[static_cast<std::size_t>(u)];
    if (us.items.empty()) {
      split.degenerate = true;
      continue;
    }
    const RankedScores ranked = rank_user(us.scores);
    const Index kept = std::min<Index>(sigma, ranked.sorted.size());
    split.split_index = kept;
    split.threshold = threshold_at(ranked.sorted, kept);
    for (std::size_t k = 0; k < ranked.order.size(); ++k) {
      const Index item = us.items[static_cast<std::size_t>(ranked.order[k])];
      result.relabel.set(u, item, static_cast<Index>(k) < kept ? 1.0 : 0.0);
    }
  }
  return result;
}

InteractionMatrix blend(const InteractionMatrix& x, const RelabelMatrix& r,
                        double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("lambda must lie in [0, 1]");
  }
  if (r.n_users() != x.n_users() || r.n_items() != x.n_items()) {
    throw ShapeError("relabel matrix shape does not match interactions");
  }
  InteractionMatrix out(x.n_users(), x.n_items());
  for (Index u = 0; u < x.n_users(); ++u) {
    for (const auto& e : x.row(u)) {
      const double w = r.get(u, e.item);
      const double v = lambda * e.value + (1.0 - lambda) * w * e.value;
      out.set(u, e.item, std::min(v, 1.0));
    }
  }
  return out;
}

void write_case_csv(const DenoiseResult& result,
                    const InteractionMatrix& original,
                    const InteractionMatrix& blended, std::ostream& out,
                    std::span<const std::string> user_ids,
                    std::span<const std::string> item_ids) {
  out << "user,item,original,normalized_score,threshold,r,blended\n";
  out.precision(10);
  for (Index u = 0; u < original.n_users(); ++u) {
    const UserScores& us = result.scores[static_cast<std::size_t>(u)];
    const UserSplit& split = result.splits[static_cast<std::size_t>(u)];
    for (const auto& e : original.row(u)) {
      auto it = std::lower_bound(us.items.begin(), us.items.end(), e.item);
      const double score =
          (it != us.items.end() && *it == e.item)
              ? us.scores[static_cast<std::size_t>(it - us.items.begin())]
              : 0.0;
      if (user_ids.empty()) {
        out << u;
      } else {
        out << user_ids[static_cast<std::size_t>(u)];
      }
      out << ',';
      if (item_ids.empty()) {
        out << e.item;
      } else {
        out << item_ids[static_cast<std::size_t>(e.item)];
      }
      out << ',' << e.value << ',' << score << ',' << split.threshold << ','
          << result.relabel.get(u, e.item) << ','
          << blended.get(u, e.item) << '\n';
    }
  }
}

}  // namespace prorec
