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

#include "prorec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_set>

#include "prorec/errors.hpp"

namespace prorec {

RankedList rank_items(const Matrix& scores, const InteractionMatrix& exclude,
                      Index k) {
  if (scores.rows() != exclude.n_users() ||
      scores.cols() != exclude.n_items()) {
    throw ShapeError("score matrix does not match the exclusion matrix");
  }
  if (k < 1) throw ConfigError("ranking cutoff must be >= 1");
  RankedList ranked;
  ranked.k = k;
  ranked.items.resize(static_cast<std::size_t>(scores.rows()));
  Index short_lists = 0;
  std::vector<Index> candidates;
  for (Index u = 0; u < scores.rows(); ++u) {
    candidates.clear();
    const auto seen = exclude.row(u);
    std::size_t s = 0;
    for (Index i = 0; i < scores.cols(); ++i) {
      while (s < seen.size() && seen[s].item < i) ++s;
      if (s < seen.size() && seen[s].item == i) continue;
      candidates.push_back(i);
    }
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k),
                                            candidates.size());
    if (take < static_cast<std::size_t>(k)) ++short_lists;
    std::partial_sort(candidates.begin(), candidates.begin() + take,
                      candidates.end(), [&](Index a, Index b) {
                        const double sa = scores(u, a);
                        const double sb = scores(u, b);
                        return sa > sb || (sa == sb && a < b);
                      });
    candidates.resize(take);
    ranked.items[static_cast<std::size_t>(u)] = candidates;
  }
  if (short_lists > 0) {
    warn(std::to_string(short_lists) + " users have fewer than " +
         std::to_string(k) + " candidate items");
  }
  return ranked;
}

Truth truth_from(const InteractionMatrix& x) {
  Truth truth(static_cast<std::size_t>(x.n_users()));
  for (Index u = 0; u < x.n_users(); ++u) {
    truth[static_cast<std::size_t>(u)] = x.row_items(u);
  }
  return truth;
}

namespace {

template <typename PerUser>
MetricValue macro_average(const RankedList& ranked, const Truth& truth,
                          Index k, PerUser per_user) {
  if (k < 1) throw ConfigError("metric cutoff must be >= 1");
  if (k > ranked.k) {
    throw ConfigError("metric cutoff exceeds the ranked list length");
  }
  MetricValue m;
  const std::size_t n = std::min(ranked.items.size(), truth.size());
  for (std::size_t u = 0; u < n; ++u) {
    if (truth[u].empty()) continue;
    const std::unordered_set<Index> relevant(truth[u].begin(), truth[u].end());
    const auto& list = ranked.items[u];
    const auto cut = std::min<std::size_t>(static_cast<std::size_t>(k),
                                           list.size());
    m.value += per_user(list, cut, relevant);
    ++m.n_users;
  }
  if (m.n_users > 0) m.value /= static_cast<double>(m.n_users);
  return m;
}

}  // namespace

MetricValue recall_at_k(const RankedList& ranked, const Truth& truth,
                        Index k) {
  return macro_average(
      ranked, truth, k,
      [](const std::vector<Index>& list, std::size_t cut,
         const std::unordered_set<Index>& relevant) {
        std::size_t hits = 0;
        for (std::size_t r = 0; r < cut; ++r) hits += relevant.count(list[r]);
        return static_cast<double>(hits) /
               static_cast<double>(relevant.size());
      });
}

MetricValue ndcg_at_k(const RankedList& ranked, const Truth& truth, Index k) {
  return macro_average(
      ranked, truth, k,
      [k](const std::vector<Index>& list, std::size_t cut,
          const std::unordered_set<Index>& relevant) {
        double dcg = 0.0;
        for (std::size_t r = 0; r < cut; ++r) {
          if (relevant.count(list[r])) dcg += 1.0 / std::log2(r + 2.0);
        }
        double ideal = 0.0;
        const auto n_ideal =
            std::min<std::size_t>(static_cast<std::size_t>(k), relevant.size());
        for (std::size_t r = 0; r < n_ideal; ++r) {
          ideal += 1.0 / std::log2(r + 2.0);
        }
        return dcg / ideal;
      });
}

MetricValue map_at_k(const RankedList& ranked, const Truth& truth, Index k) {
  return macro_average(
      ranked, truth, k,
      [k](const std::vector<Index>& list, std::size_t cut,
          const std::unordered_set<Index>& relevant) {
        double score = 0.0;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < cut; ++r) {
          if (relevant.count(list[r])) {
            ++hits;
            score += static_cast<double>(hits) / static_cast<double>(r + 1);
          }
        }
        const auto denom =
            std::min<std::size_t>(static_cast<std::size_t>(k), relevant.size());
        return score / static_cast<double>(denom);
      });
}

namespace {

struct Flagged {
  std::vector<std::pair<Index, Index>> pairs;  // sorted
  Index scored = 0;                            // positives carrying an r
};

Flagged flagged_pairs(const DenoiseResult& result, const NoiseLedger& ledger,
                      HitRatioMode mode) {
  Flagged f;
  const RelabelMatrix& r = result.relabel;
  std::vector<std::tuple<double, Index, Index>> all;
  for (Index u = 0; u < r.n_users(); ++u) {
    for (const auto& e : r.row(u)) {
      ++f.scored;
      if (mode == HitRatioMode::kBelowThreshold) {
        if (e.value < 0.5) f.pairs.emplace_back(u, e.item);
      } else {
        all.emplace_back(e.value, u, e.item);
      }
    }
  }
  if (mode == HitRatioMode::kLowestScores) {
    const auto take = std::min(all.size(), ledger.injected.size());
    std::partial_sort(all.begin(), all.begin() + take, all.end());
    for (std::size_t k = 0; k < take; ++k) {
      f.pairs.emplace_back(std::get<1>(all[k]), std::get<2>(all[k]));
    }
  }
  std::sort(f.pairs.begin(), f.pairs.end());
  return f;
}

}  // namespace

double noise_hit_ratio(const DenoiseResult& result, const NoiseLedger& ledger,
                       HitRatioMode mode) {
  if (ledger.injected.empty()) {
    throw DataError("hit ratio is undefined for an empty noise ledger");
  }
  const Flagged f = flagged_pairs(result, ledger, mode);
  Index hits = 0;
  for (const auto& [u, i] : ledger.injected) {
    hits += std::binary_search(f.pairs.begin(), f.pairs.end(),
                               std::make_pair(u, i))
                ? 1
                : 0;
  }
  return static_cast<double>(hits) /
         static_cast<double>(ledger.injected.size());
}

double flag_rate(const DenoiseResult& result, const NoiseLedger& ledger,
                 HitRatioMode mode) {
  const Flagged f = flagged_pairs(result, ledger, mode);
  if (f.scored == 0) return 0.0;
  return static_cast<double>(f.pairs.size()) / static_cast<double>(f.scored);
}

std::vector<MetricRow> evaluate_ranking(const Matrix& scores,
                                        const InteractionMatrix& train,
                                        const InteractionMatrix& heldout,
                                        const std::vector<Index>& cutoffs) {
  if (cutoffs.empty()) return {};
  const Index k_max = *std::max_element(cutoffs.begin(), cutoffs.end());
  const RankedList ranked = rank_items(scores, train, k_max);
  const Truth truth = truth_from(heldout);
  std::vector<MetricRow> rows;
  for (const Index k : cutoffs) {
    const MetricValue recall = recall_at_k(ranked, truth, k);
    const MetricValue ndcg = ndcg_at_k(ranked, truth, k);
    const MetricValue map = map_at_k(ranked, truth, k);
    rows.push_back({"recall", k, recall.value, recall.n_users});
    rows.push_back({"ndcg", k, ndcg.value, ndcg.n_users});
    rows.push_back({"map", k, map.value, map.n_users});
  }
  return rows;
}

void write_metric_table_csv(const std::vector<MetricRow>& rows,
                            std::ostream& out) {
  out << "metric,k,value,n_users\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.metric << ',' << r.k << ',' << r.value << ',' << r.n_users
        << '\n';
  }
}

}  // namespace prorec
