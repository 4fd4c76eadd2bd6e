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

#ifndef PROREC_TRANSPORT_HPP_
#define PROREC_TRANSPORT_HPP_

#include <iosfwd>
#include <string>

#include "prorec/core.hpp"

namespace prorec {

// p is the item-side mass (column sums of a plan), q the user-side mass (row
// sums). Both sum to one.
struct Marginals {
  Vector items;  // p, length N
  Vector users;  // q, length M

  // Number of zero-count users/items that received the epsilon mass.
  Index patched_users = 0;
  Index patched_items = 0;

  // Throws DataError unless both vectors are nonnegative and sum to 1 within
  // 1e-9.
  void validate() const;
};

enum class PlanKind { kSinkhorn, kRelaxedRow, kRelaxedCol, kRelaxedMax, kEmd };

std::string to_string(PlanKind kind);

struct TransportPlan {
  Matrix pi;
  double gamma = 0.0;
  PlanKind kind = PlanKind::kRelaxedMax;

  // Sinkhorn metadata; other kinds leave the defaults.
  int iterations = 0;
  bool converged = true;
  double marginal_error = 0.0;  // L1 row error + L1 column error
  bool log_domain = false;
};

struct SinkhornOptions {
  int max_iters = 500;
  double tol = 1e-6;
};

// sum_ij pi_ij (log pi_ij - 1), with 0 log 0 = 0.
double entropy(const Matrix& pi);
inline double entropy(const TransportPlan& plan) { return entropy(plan.pi); }

// sum_ij M_ij pi_ij.
double transport_cost(const CostMatrix& cost, const Matrix& pi);

// Entropic OT with both marginals by alternating diagonal scaling of
// exp(-M / gamma). Falls back to log-domain updates when a scaling factor
// leaves [1e-300, 1e300] or the kernel underflows.
TransportPlan sinkhorn(const CostMatrix& cost, const Marginals& marginals,
                       double gamma, const SinkhornOptions& options = {});

// Row-constrained closed form: row i is q_i * softmax_j(-M_ij / gamma).
TransportPlan relaxed_plan_row(const CostMatrix& cost, const Vector& q,
                               double gamma);

// Column-constrained closed form: column j is p_j * softmax_i(-M_ij / gamma).
TransportPlan relaxed_plan_col(const CostMatrix& cost, const Vector& p,
                               double gamma);

// Elementwise max of the two one-sided plans.
TransportPlan relaxed_plan(const CostMatrix& cost, const Marginals& marginals,
                           double gamma);

// Largest instance emd_exact_small accepts (M * N).
inline constexpr Index kEmdMaxEntries = 10000;

// Exact unregularized OT as min-cost flow on marginals scaled to integers
// (1e6 units).
TransportPlan emd_exact_small(const CostMatrix& cost,
                              const Marginals& marginals);

// Sparse "user,item,value" triplets for entries with value > threshold.
void write_plan_csv(const TransportPlan& plan, std::ostream& out,
                    double threshold = 0.0);

}  // namespace prorec

#endif  // PROREC_TRANSPORT_HPP_
