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

#include "prorec/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "prorec/errors.hpp"

namespace prorec {

Dataset Dataset::with_interactions(InteractionMatrix x) const {
  Dataset out = *this;
  out.interactions = std::move(x);
  out.duplicates = 0;
  return out;
}

bool NoiseLedger::contains(Index user, Index item) const {
  return std::binary_search(injected.begin(), injected.end(),
                            std::make_pair(user, item));
}

namespace {

Index intern(const std::string& id, std::vector<std::string>& ids,
             std::unordered_map<std::string, Index>& index) {
  auto [it, inserted] = index.emplace(id, static_cast<Index>(ids.size()));
  if (inserted) ids.push_back(id);
  return it->second;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

}  // namespace

Dataset load_interactions(std::istream& in, const std::string& name) {
  Dataset ds;
  ds.name = name;
  std::vector<std::pair<Index, Index>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (fields.size() < 2 || fields.size() > 3) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected user<TAB>item[<TAB>value]");
    }
    if (fields.size() == 3) {
      double value = 0.0;
      std::size_t used = 0;
      try {
        value = std::stod(fields[2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != fields[2].size() || !std::isfinite(value)) {
        throw DataError("line " + std::to_string(line_no) +
                        ": malformed value '" + fields[2] + "'");
      }
      if (value <= 0.0) continue;
    }
    const Index u = intern(fields[0], ds.user_ids, ds.user_index);
    const Index i = intern(fields[1], ds.item_ids, ds.item_index);
    pairs.emplace_back(u, i);
  }
  if (pairs.empty()) {
    throw DataError("dataset '" + name + "' has no interactions");
  }
  ds.interactions = InteractionMatrix::from_pairs(
      static_cast<Index>(ds.user_ids.size()),
      static_cast<Index>(ds.item_ids.size()), pairs);
  ds.duplicates = static_cast<Index>(pairs.size()) - ds.interactions.nnz();
  if (ds.duplicates > 0) {
    warn("dataset '" + name + "': collapsed " +
         std::to_string(ds.duplicates) + " duplicate interactions");
  }
  return ds;
}

Dataset load_interactions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return load_interactions(in, path.stem().string());
}

void write_interactions(const Dataset& ds, const InteractionMatrix& x,
                        std::ostream& out) {
  for (Index u = 0; u < x.n_users(); ++u) {
    for (const auto& e : x.row(u)) {
      out << ds.user_ids[static_cast<std::size_t>(u)] << '\t'
          << ds.item_ids[static_cast<std::size_t>(e.item)] << '\n';
    }
  }
}

SplitScheme parse_split_scheme(const std::string& text) {
  if (text == "4:1") return SplitScheme::kTrainTest41;
  if (text == "5:2:3") return SplitScheme::kTrainValTest523;
  throw ConfigError("unknown split scheme '" + text +
                    "' (expected 4:1 or 5:2:3)");
}

std::string to_string(SplitScheme scheme) {
  return scheme == SplitScheme::kTrainTest41 ? "4:1" : "5:2:3";
}

namespace {

std::vector<Index> fold_sizes(Index n, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<Index> sizes(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  Index assigned = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double exact = static_cast<double>(n) * weights[k] / total;
    sizes[k] = static_cast<Index>(std::floor(exact));
    assigned += sizes[k];
    rem.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (Index r = 0; r < n - assigned; ++r) {
    ++sizes[rem[static_cast<std::size_t>(r)].second];
  }
  return sizes;
}

const char* fold_name(SplitScheme scheme, int fold) {
  if (scheme == SplitScheme::kTrainTest41) {
    return fold == 0 ? "train" : "test";
  }
  return fold == 0 ? "train" : (fold == 1 ? "validation" : "test");
}

}  // namespace

SplitResult split_random(const InteractionMatrix& x, SplitScheme scheme,
                         std::uint64_t seed) {
  const std::vector<double> weights =
      scheme == SplitScheme::kTrainTest41 ? std::vector<double>{4, 1}
                                          : std::vector<double>{5, 2, 3};
  const auto pairs = x.pairs();
  const Index n = static_cast<Index>(pairs.size());
  const auto sizes = fold_sizes(n, weights);

  std::mt19937_64 rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  SplitResult result;
  result.assignment.assign(static_cast<std::size_t>(n), 0);
  Index pos = 0;
  for (std::size_t f = 0; f < sizes.size(); ++f) {
    for (Index k = 0; k < sizes[f]; ++k) {
      result.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos++)])] =
          static_cast<int>(f);
    }
  }

  // Users without a training interaction swap one in from a user with spare.
  std::vector<Index> train_count(static_cast<std::size_t>(x.n_users()), 0);
  std::vector<std::vector<Index>> by_user(static_cast<std::size_t>(x.n_users()));
  for (Index k = 0; k < n; ++k) {
    const auto u = static_cast<std::size_t>(pairs[static_cast<std::size_t>(k)].first);
    by_user[u].push_back(k);
    if (result.assignment[static_cast<std::size_t>(k)] == 0) ++train_count[u];
  }
  if (n > 0) {
    std::uniform_int_distribution<Index> any(0, n - 1);
    for (Index u = 0; u < x.n_users(); ++u) {
      const auto su = static_cast<std::size_t>(u);
      if (by_user[su].empty() || train_count[su] > 0) continue;
      bool fixed = false;
      for (int attempt = 0; attempt < 10 && !fixed; ++attempt) {
        const Index donor = any(rng);
        const auto sd = static_cast<std::size_t>(donor);
        const auto donor_user =
            static_cast<std::size_t>(pairs[sd].first);
        if (result.assignment[sd] != 0 || train_count[donor_user] < 2) {
          continue;
        }
        std::uniform_int_distribution<std::size_t> pick(
            0, by_user[su].size() - 1);
        const auto mine = static_cast<std::size_t>(by_user[su][pick(rng)]);
        std::swap(result.assignment[sd], result.assignment[mine]);
        --train_count[donor_user];
        ++train_count[su];
        fixed = true;
      }
      if (!fixed) {
        warn("user " + std::to_string(u) +
             " has no training interaction after 10 re-draws");
      }
    }
  }

  for (std::size_t f = 0; f < sizes.size(); ++f) {
    result.folds.emplace_back(x.n_users(), x.n_items());
  }
  for (Index k = 0; k < n; ++k) {
    const auto& [u, i] = pairs[static_cast<std::size_t>(k)];
    result.folds[static_cast<std::size_t>(
                     result.assignment[static_cast<std::size_t>(k)])]
        .set(u, i, 1.0);
  }
  return result;
}

void write_split_manifest(const Dataset& ds, const InteractionMatrix& x,
                          const SplitResult& split, SplitScheme scheme,
                          std::ostream& out) {
  out << "user\titem\tfold\n";
  const auto pairs = x.pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out << ds.user_ids[static_cast<std::size_t>(pairs[k].first)] << '\t'
        << ds.item_ids[static_cast<std::size_t>(pairs[k].second)] << '\t'
        << fold_name(scheme, split.assignment[k]) << '\n';
  }
}

std::pair<InteractionMatrix, NoiseLedger> inject_noise(
    const InteractionMatrix& train, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("noise ratio must lie in (0, 1)");
  }
  const auto k = static_cast<Index>(
      std::llround(ratio * static_cast<double>(train.nnz())));
  const Index cells = train.n_users() * train.n_items();
  const Index absent = cells - train.nnz();
  if (k > absent) {
    throw DataError("cannot inject " + std::to_string(k) +
                    " noisy pairs: only " + std::to_string(absent) +
                    " absent pairs exist");
  }
  std::mt19937_64 rng(seed);
  NoiseLedger ledger;
  ledger.ratio = ratio;
  if (absent <= 4 * k) {
    std::vector<std::pair<Index, Index>> candidates;
    candidates.reserve(static_cast<std::size_t>(absent));
    for (Index u = 0; u < train.n_users(); ++u) {
      for (Index i = 0; i < train.n_items(); ++i) {
        if (!train.contains(u, i)) candidates.emplace_back(u, i);
      }
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(static_cast<std::size_t>(k));
    ledger.injected = std::move(candidates);
  } else {
    std::uniform_int_distribution<Index> cell(0, cells - 1);
    std::unordered_set<Index> chosen;
    while (static_cast<Index>(ledger.injected.size()) < k) {
      const Index c = cell(rng);
      const Index u = c / train.n_items();
      const Index i = c % train.n_items();
      if (train.contains(u, i) || !chosen.insert(c).second) continue;
      ledger.injected.emplace_back(u, i);
    }
  }
  std::sort(ledger.injected.begin(), ledger.injected.end());
  InteractionMatrix noisy = train;
  for (const auto& [u, i] : ledger.injected) noisy.set(u, i, 1.0);
  return {std::move(noisy), std::move(ledger)};
}

void write_ledger(const Dataset& ds, const NoiseLedger& ledger,
                  std::ostream& out) {
  out << "user\titem\n";
  for (const auto& [u, i] : ledger.injected) {
    out << ds.user_ids[static_cast<std::size_t>(u)] << '\t'
        << ds.item_ids[static_cast<std::size_t>(i)] << '\n';
  }
}

Marginals popularity_marginals(const InteractionMatrix& x) {
  if (x.nnz() == 0) {
    throw DataError("cannot compute popularity of an empty matrix");
  }
  const double total = static_cast<double>(x.nnz());
  const double eps = 1.0 / (10.0 * total);
  Marginals m;
  m.users.resize(x.n_users());
  m.items.resize(x.n_items());
  for (Index u = 0; u < x.n_users(); ++u) {
    const auto count = static_cast<double>(x.row(u).size());
    if (count == 0.0) ++m.patched_users;
    m.users[u] = count > 0.0 ? count / total : eps;
  }
  const auto item_counts = x.item_counts();
  for (Index i = 0; i < x.n_items(); ++i) {
    const auto count =
        static_cast<double>(item_counts[static_cast<std::size_t>(i)]);
    if (count == 0.0) ++m.patched_items;
    m.items[i] = count > 0.0 ? count / total : eps;
  }
  if (m.patched_users > 0) m.users /= m.users.sum();
  if (m.patched_items > 0) m.items /= m.items.sum();
  if (m.patched_users > 0 || m.patched_items > 0) {
    warn("popularity: " + std::to_string(m.patched_users) + " users and " +
         std::to_string(m.patched_items) +
         " items without interactions received epsilon mass");
  }
  return m;
}

Dataset generate_planted(Index n_users, Index n_items, Index communities,
                         double density, std::uint64_t seed) {
  if (n_users < 1 || n_items < 1 || communities < 1) {
    throw ConfigError("planted data needs positive sizes");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw ConfigError("planted density must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> group(0, communities - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Index> user_group(static_cast<std::size_t>(n_users));
  std::vector<Index> item_group(static_cast<std::size_t>(n_items));
  for (auto& g : user_group) g = group(rng);
  for (auto& g : item_group) g = group(rng);

  Dataset ds;
  ds.name = "planted-" + std::to_string(n_users) + "x" +
            std::to_string(n_items);
  for (Index u = 0; u < n_users; ++u) {
    intern("u" + std::to_string(u), ds.user_ids, ds.user_index);
  }
  for (Index i = 0; i < n_items; ++i) {
    intern("i" + std::to_string(i), ds.item_ids, ds.item_index);
  }
  ds.interactions = InteractionMatrix(n_users, n_items);
  for (Index u = 0; u < n_users; ++u) {
    for (Index i = 0; i < n_items; ++i) {
      const bool same = user_group[static_cast<std::size_t>(u)] ==
                        item_group[static_cast<std::size_t>(i)];
      // Draw for every pair so the stream does not depend on group layout.
      const double c = coin(rng);
      if (same && c < density) ds.interactions.set(u, i, 1.0);
    }
  }
  return ds;
}

}  // namespace prorec
