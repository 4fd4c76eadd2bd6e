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

#ifndef PROREC_CORE_HPP_
#define PROREC_CORE_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace prorec {

using Index = std::ptrdiff_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Entry {
  Index item;
  double value;
};

// Sparse user x item matrix with values in (0, 1]. Absent pairs are zero.
// Rows are kept sorted by item index.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  InteractionMatrix(Index n_users, Index n_items);

  // Builds a binary matrix from (user, item) pairs. Duplicates collapse.
  static InteractionMatrix from_pairs(
      Index n_users, Index n_items,
      std::span<const std::pair<Index, Index>> pairs);
  // Entries of `dense` that are nonzero are stored; all must lie in (0, 1].
  static InteractionMatrix from_dense(const Matrix& dense);

  Index n_users() const { return n_users_; }
  Index n_items() const { return n_items_; }
  Index nnz() const { return nnz_; }
  bool is_binary() const;

  // Setting 0 removes the entry. Throws std::out_of_range for bad indices and
  // std::invalid_argument for values outside [0, 1].
  void set(Index user, Index item, double value);
  double get(Index user, Index item) const;
  bool contains(Index user, Index item) const;

  std::span<const Entry> row(Index user) const { return rows_[user]; }
  std::vector<Index> row_items(Index user) const;

  // Per-item count of stored entries.
  std::vector<Index> item_counts() const;
  double squared_norm() const;
  Matrix to_dense() const;
  std::vector<std::pair<Index, Index>> pairs() const;

  friend bool operator==(const InteractionMatrix& a,
                         const InteractionMatrix& b);

 private:
  void check_index(Index user, Index item) const;

  Index n_users_ = 0;
  Index n_items_ = 0;
  Index nnz_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

// User embeddings (M x d) and item embeddings (N x d).
struct FactorModel {
  Matrix users;
  Matrix items;
  double zeta = 0.0;

  Index dim() const { return users.cols(); }
  Index n_users() const { return users.rows(); }
  Index n_items() const { return items.rows(); }
  bool all_finite() const;
};

enum class CostProvenance { kInnerProduct, kExternal };

struct CostMatrix {
  Matrix values;
  CostProvenance provenance = CostProvenance::kExternal;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  // Wraps a caller-supplied cost (e.g. from a neural scorer).
  static CostMatrix external(Matrix values);
};

// U * V^T.
Matrix predict_scores(const FactorModel& model);

// -U * V^T, tagged as inner-product provenance.
CostMatrix cost_matrix(const FactorModel& model);

// ||X - U V^T||_F^2 + zeta (||U||^2 + ||V||^2).
double objective(const FactorModel& model, const InteractionMatrix& x);

// The zeta-weighted norm part of `objective` alone.
double regularization(const FactorModel& model);

}  // namespace prorec

#endif  // PROREC_CORE_HPP_
