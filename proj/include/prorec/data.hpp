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

#ifndef PROREC_DATA_HPP_
#define PROREC_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prorec/core.hpp"
#include "prorec/transport.hpp"

namespace prorec {

struct Dataset {
  std::string name;
  InteractionMatrix interactions;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, Index> user_index;
  std::unordered_map<std::string, Index> item_index;
  Index duplicates = 0;  // lines collapsed while loading

  // A dataset sharing this one's ID maps but holding other interactions.
  Dataset with_interactions(InteractionMatrix x) const;
};

struct NoiseLedger {
  std::vector<std::pair<Index, Index>> injected;  // (user, item), sorted
  double ratio = 0.0;

  bool contains(Index user, Index item) const;
};

// Reads "user<TAB>item[<TAB>value]" lines. Rows with value <= 0 are skipped;
// IDs are indexed in first-seen order. Blank lines and lines starting with
// '#' are ignored.
Dataset load_interactions(std::istream& in, const std::string& name = "");
Dataset load_interactions(const std::filesystem::path& path);

// Writes "user<TAB>item" lines using the dataset's external IDs.
void write_interactions(const Dataset& ds, const InteractionMatrix& x,
                        std::ostream& out);

enum class SplitScheme { kTrainTest41, kTrainValTest523 };

SplitScheme parse_split_scheme(const std::string& text);
std::string to_string(SplitScheme scheme);

struct SplitResult {
  // Folds in scheme order: {train, test} or {train, validation, test}.
  std::vector<InteractionMatrix> folds;
  // Fold index for each interaction of the source, in pairs() order.
  std::vector<int> assignment;
};

// Random per-interaction split with exact global fold sizes. Users keep at
// least one training interaction whenever they have one to spare.
SplitResult split_random(const InteractionMatrix& x, SplitScheme scheme,
                         std::uint64_t seed);

// "user<TAB>item<TAB>fold" manifest with fold names train/validation/test.
void write_split_manifest(const Dataset& ds, const InteractionMatrix& x,
                          const SplitResult& split, SplitScheme scheme,
                          std::ostream& out);

// Adds round(ratio * nnz) uniformly drawn absent pairs as positives.
std::pair<InteractionMatrix, NoiseLedger> inject_noise(
    const InteractionMatrix& train, double ratio, std::uint64_t seed);

void write_ledger(const Dataset& ds, const NoiseLedger& ledger,
                  std::ostream& out);

// p_j and q_i proportional to interaction counts of items and users. Users or
// items without interactions get 1 / (10 * total) before renormalization.
Marginals popularity_marginals(const InteractionMatrix& x);

// Planted-community data: users and items are assigned to one of
// `communities` groups uniformly at random and each same-group pair is a
// positive with probability `density`. The expected matrix has rank equal to
// the number of communities.
Dataset generate_planted(Index n_users, Index n_items, Index communities,
                         double density, std::uint64_t seed);

}  // namespace prorec

#endif  // PROREC_DATA_HPP_
