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

#include "prorec/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "prorec/errors.hpp"

namespace prorec {

InteractionMatrix::InteractionMatrix(Index n_users, Index n_items)
    : n_users_(n_users), n_items_(n_items) {
  if (n_users < 0 || n_items < 0) {
    throw std::invalid_argument("interaction matrix dimensions must be >= 0");
  }
  rows_.resize(static_cast<std::size_t>(n_users));
}

InteractionMatrix InteractionMatrix::from_pairs(
    Index n_users, Index n_items,
    std::span<const std::pair<Index, Index>> pairs) {
  InteractionMatrix x(n_users, n_items);
  for (const auto& [u, i] : pairs) x.set(u, i, 1.0);
  return x;
}

InteractionMatrix InteractionMatrix::from_dense(const Matrix& dense) {
  InteractionMatrix x(dense.rows(), dense.cols());
  for (Index u = 0; u < dense.rows(); ++u) {
    for (Index i = 0; i < dense.cols(); ++i) {
      if (dense(u, i) != 0.0) x.set(u, i, dense(u, i));
    }
  }
  return x;
}

void InteractionMatrix::check_index(Index user, Index item) const {
  if (user < 0 || user >= n_users_ || item < 0 || item >= n_items_) {
    throw std::out_of_range("interaction index (" + std::to_string(user) +
                            ", " + std::to_string(item) +
                            ") outside " + std::to_string(n_users_) + "x" +
                            std::to_string(n_items_));
  }
}

bool InteractionMatrix::is_binary() const {
  for (const auto& r : rows_) {
    for (const auto& e : r) {
      if (e.value != 1.0) return false;
    }
  }
  return true;
}

void InteractionMatrix::set(Index user, Index item, double value) {
  check_index(user, item);
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("interaction value must lie in [0, 1]");
  }
  auto& r = rows_[static_cast<std::size_t>(user)];
  auto it = std::lower_bound(
      r.begin(), r.end(), item,
      [](const Entry& e, Index target) { return e.item < target; });
  const bool present = it != r.end() && it->item == item;
  if (value == 0.0) {
    if (present) {
      r.erase(it);
      --nnz_;
    }
    return;
  }
  if (present) {
    it->value = value;
  } else {
    r.insert(it, Entry{item, value});
    ++nnz_;
  }
}

double InteractionMatrix::get(Index user, Index item) const {
  check_index(user, item);
  const auto& r = rows_[static_cast<std::size_t>(user)];
  auto it = std::lower_bound(
      r.begin(), r.end(), item,
      [](const Entry& e, Index target) { return e.item < target; });
  return (it != r.end() && it->item == item) ? it->value : 0.0;
}

bool InteractionMatrix::contains(Index user, Index item) const {
  return get(user, item) != 0.0;
}

std::vector<Index> InteractionMatrix::row_items(Index user) const {
  std::vector<Index> out;
  out.reserve(rows_[static_cast<std::size_t>(user)].size());
  for (const auto& e : rows_[static_cast<std::size_t>(user)]) {
    out.push_back(e.item);
  }
  return out;
}

std::vector<Index> InteractionMatrix::item_counts() const {
  std::vector<Index> counts(static_cast<std::size_t>(n_items_), 0);
  for (const auto& r : rows_) {
    for (const auto& e : r) ++counts[static_cast<std::size_t>(e.item)];
  }
  return counts;
}

double InteractionMatrix::squared_norm() const {
  double s = 0.0;
  for (const auto& r : rows_) {
    for (const auto& e : r) s += e.value * e.value;
  }
  return s;
}

Matrix InteractionMatrix::to_dense() const {
  Matrix d = Matrix::Zero(n_users_, n_items_);
  for (Index u = 0; u < n_users_; ++u) {
    for (const auto& e : rows_[static_cast<std::size_t>(u)]) {
      d(u, e.item) = e.value;
    }
  }
  return d;
}

std::vector<std::pair<Index, Index>> InteractionMatrix::pairs() const {
  std::vector<std::pair<Index, Index>> out;
  out.reserve(static_cast<std::size_t>(nnz_));
  for (Index u = 0; u < n_users_; ++u) {
    for (const auto& e : rows_[static_cast<std::size_t>(u)]) {
      out.emplace_back(u, e.item);
    }
  }
  return out;
}

bool operator==(const InteractionMatrix& a, const InteractionMatrix& b) {
  if (a.n_users_ != b.n_users_ || a.n_items_ != b.n_items_ ||
      a.nnz_ != b.nnz_) {
    return false;
  }
  for (std::size_t u = 0; u < a.rows_.size(); ++u) {
    const auto& ra = a.rows_[u];
    const auto& rb = b.rows_[u];
    if (ra.size() != rb.size()) return false;
    for (std::size_t k = 0; k < ra.size(); ++k) {
      if (ra[k].item != rb[k].item || ra[k].value != rb[k].value) return false;
    }
  }
  return true;
}

bool FactorModel::all_finite() const {
  return users.allFinite() && items.allFinite();
}

CostMatrix CostMatrix::external(Matrix values) {
  if (!values.allFinite()) {
    throw NumericalError("external cost matrix has non-finite entries");
  }
  return CostMatrix{std::move(values), CostProvenance::kExternal};
}

namespace {
void check_model(const FactorModel& model) {
  if (model.users.cols() != model.items.cols()) {
    throw ShapeError("embedding dimensions differ: U has " +
                     std::to_string(model.users.cols()) + " columns, V has " +
                     std::to_string(model.items.cols()));
  }
}
}  // namespace

Matrix predict_scores(const FactorModel& model) {
  check_model(model);
  return model.users * model.items.transpose();
}

CostMatrix cost_matrix(const FactorModel& model) {
  Matrix scores = predict_scores(model);
  scores = -scores;
  return CostMatrix{std::move(scores), CostProvenance::kInnerProduct};
}

double regularization(const FactorModel& model) {
  return model.zeta *
         (model.users.squaredNorm() + model.items.squaredNorm());
}

double objective(const FactorModel& model, const InteractionMatrix& x) {
  check_model(model);
  if (model.n_users() != x.n_users() || model.n_items() != x.n_items()) {
    throw ShapeError("model is " + std::to_string(model.n_users()) + "x" +
                     std::to_string(model.n_items()) +
                     " but interactions are " + std::to_string(x.n_users()) +
                     "x" + std::to_string(x.n_items()));
  }
  // Row-by-row to avoid materializing the residual.
  double loss = 0.0;
  Vector row(model.n_items());
  for (Index u = 0; u < model.n_users(); ++u) {
    row.noalias() = model.items * model.users.row(u).transpose();
    for (const auto& e : x.row(u)) row[e.item] -= e.value;
    loss += row.squaredNorm();
  }
  return loss + regularization(model);
}

}  // namespace prorec
