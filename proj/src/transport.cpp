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

#include "prorec/transport.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "prorec/errors.hpp"

namespace prorec {

void Marginals::validate() const {
  auto check = [](const Vector& v, const char* name) {
    if (v.size() == 0) throw DataError(std::string(name) + " marginal is empty");
    if ((v.array() < 0.0).any() || !v.allFinite()) {
      throw DataError(std::string(name) + " marginal has negative entries");
    }
    if (std::abs(v.sum() - 1.0) > 1e-9) {
      throw DataError(std::string(name) + " marginal sums to " +
                      std::to_string(v.sum()) + ", expected 1");
    }
  };
  check(items, "item");
  check(users, "user");
}

std::string to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::kSinkhorn: return "sinkhorn";
    case PlanKind::kRelaxedRow: return "relaxed-row";
    case PlanKind::kRelaxedCol: return "relaxed-col";
    case PlanKind::kRelaxedMax: return "relaxed-max";
    case PlanKind::kEmd: return "emd";
  }
  return "unknown";
}

double entropy(const Matrix& pi) {
  double h = 0.0;
  for (Index k = 0; k < pi.size(); ++k) {
    const double x = pi.data()[k];
    if (x > 0.0) h += x * (std::log(x) - 1.0);
  }
  return h;
}

double transport_cost(const CostMatrix& cost, const Matrix& pi) {
  if (cost.rows() != pi.rows() || cost.cols() != pi.cols()) {
    throw ShapeError("cost and plan shapes differ");
  }
  return cost.values.cwiseProduct(pi).sum();
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be a positive finite number");
  }
}

void check_cost(const CostMatrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    throw ShapeError("cost matrix is empty");
  }
  if (!cost.values.allFinite()) {
    throw NumericalError("cost matrix has non-finite entries");
  }
}

constexpr double kScaleLow = 1e-300;
constexpr double kScaleHigh = 1e300;

bool in_scaling_range(const Vector& v) {
  for (Index k = 0; k < v.size(); ++k) {
    const double x = v[k];
    if (!(x >= kScaleLow && x <= kScaleHigh)) return false;
  }
  return true;
}

// Row-wise log-sum-exp of (a + g^T).
Vector row_lse(const Matrix& a, const Vector& g) {
  Matrix shifted = a.rowwise() + g.transpose();
  Vector mx = shifted.rowwise().maxCoeff();
  Vector s = (shifted.colwise() - mx).array().exp().rowwise().sum();
  return mx.array() + s.array().log();
}

// Column-wise log-sum-exp of (a + f).
Vector col_lse(const Matrix& a, const Vector& f) {
  Matrix shifted = a.colwise() + f;
  Eigen::RowVectorXd mx = shifted.colwise().maxCoeff();
  Eigen::RowVectorXd s =
      (shifted.rowwise() - mx).array().exp().colwise().sum();
  return (mx.array() + s.array().log()).transpose();
}

TransportPlan sinkhorn_log_domain(const Matrix& a, const Marginals& m,
                                  double gamma,
                                  const SinkhornOptions& options) {
  const Vector log_q = m.users.array().log();
  const Vector log_p = m.items.array().log();
  Vector f = Vector::Zero(a.rows());
  Vector g = Vector::Zero(a.cols());
  TransportPlan plan;
  plan.gamma = gamma;
  plan.kind = PlanKind::kSinkhorn;
  plan.log_domain = true;
  plan.converged = false;
  Vector lse_rows = row_lse(a, g);
  for (int it = 1; it <= options.max_iters; ++it) {
    f = log_q - lse_rows;
    g = log_p - col_lse(a, f);
    if (!f.allFinite() || !g.allFinite()) {
      throw NumericalError("sinkhorn (log domain) produced non-finite "
                           "potentials at iteration " + std::to_string(it));
    }
    lse_rows = row_lse(a, g);
    const double row_err =
        ((f + lse_rows).array().exp() - m.users.array()).abs().sum();
    plan.iterations = it;
    plan.marginal_error = row_err;
    if (row_err <= options.tol) {
      plan.converged = true;
      break;
    }
  }
  plan.pi = ((a.colwise() + f).rowwise() + g.transpose()).array().exp();
  const double col_err =
      (plan.pi.colwise().sum().transpose() - m.items).cwiseAbs().sum();
  plan.marginal_error =
      (plan.pi.rowwise().sum() - m.users).cwiseAbs().sum() + col_err;
  return plan;
}

}  // namespace

TransportPlan sinkhorn(const CostMatrix& cost, const Marginals& marginals,
                       double gamma, const SinkhornOptions& options) {
  check_gamma(gamma);
  check_cost(cost);
  if (marginals.users.size() != cost.rows() ||
      marginals.items.size() != cost.cols()) {
    throw ShapeError("marginal lengths do not match the cost matrix");
  }
  if ((marginals.users.array() <= 0.0).any() ||
      (marginals.items.array() <= 0.0).any()) {
    throw DegenerateMarginalError(
        "sinkhorn requires strictly positive marginals");
  }
  if (options.max_iters < 1 || !(options.tol > 0.0)) {
    throw std::invalid_argument("sinkhorn needs max_iters >= 1 and tol > 0");
  }

  // A global shift leaves the plan unchanged and keeps the kernel <= 1.
  Matrix a = cost.values / -gamma;
  a.array() -= a.maxCoeff();
  const Matrix kernel = a.array().exp();
  const bool underflow = (kernel.rowwise().sum().array() <= 0.0).any() ||
                         (kernel.colwise().sum().array() <= 0.0).any();
  if (underflow) return sinkhorn_log_domain(a, marginals, gamma, options);

  const Vector& q = marginals.users;
  const Vector& p = marginals.items;
  Vector u = Vector::Ones(a.rows());
  Vector v = Vector::Ones(a.cols());
  Vector kv = kernel * v;
  TransportPlan plan;
  plan.gamma = gamma;
  plan.kind = PlanKind::kSinkhorn;
  plan.converged = false;
  for (int it = 1; it <= options.max_iters; ++it) {
    u = q.cwiseQuotient(kv);
    v = p.cwiseQuotient(kernel.transpose() * u);
    if (!in_scaling_range(u) || !in_scaling_range(v)) {
      return sinkhorn_log_domain(a, marginals, gamma, options);
    }
    kv.noalias() = kernel * v;
    const double row_err = (u.cwiseProduct(kv) - q).cwiseAbs().sum();
    plan.iterations = it;
    plan.marginal_error = row_err;
    if (row_err <= options.tol) {
      plan.converged = true;
      break;
    }
  }
  plan.pi = u.asDiagonal() * kernel * v.asDiagonal();
  if (!plan.pi.allFinite()) {
    throw NumericalError("sinkhorn plan is non-finite after iteration " +
                         std::to_string(plan.iterations));
  }
  plan.marginal_error =
      (plan.pi.rowwise().sum() - q).cwiseAbs().sum() +
      (plan.pi.colwise().sum().transpose() - p).cwiseAbs().sum();
  return plan;
}

namespace {

// Both helpers write into `out` to avoid full-size temporaries; the plan
// builders call them on matrices of up to a few million entries.
void row_softmax_scaled(const Matrix& m, double gamma, const Vector& q,
                        Matrix& out) {
  // Subtracting each row's max of -M/gamma is the row-min cost shift.
  const Vector lo = m.rowwise().minCoeff();
  out.resize(m.rows(), m.cols());
  out.array() = ((m.colwise() - lo) * (-1.0 / gamma)).array().exp();
  const Vector scale = q.array() / out.rowwise().sum().array();
  out.array().colwise() *= scale.array();
}

void col_softmax_scaled(const Matrix& m, double gamma, const Vector& p,
                        Matrix& out) {
  const Eigen::RowVectorXd lo = m.colwise().minCoeff();
  out.resize(m.rows(), m.cols());
  out.array() = ((m.rowwise() - lo) * (-1.0 / gamma)).array().exp();
  const Eigen::RowVectorXd scale =
      p.transpose().array() / out.colwise().sum().array();
  out.array().rowwise() *= scale.array();
}

void check_length(const Vector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw ShapeError(std::string(what) + " marginal has length " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(expected));
  }
}

}  // namespace

TransportPlan relaxed_plan_row(const CostMatrix& cost, const Vector& q,
                               double gamma) {
  check_gamma(gamma);
  check_cost(cost);
  check_length(q, cost.rows(), "user");
  TransportPlan plan{Matrix(), gamma, PlanKind::kRelaxedRow};
  row_softmax_scaled(cost.values, gamma, q, plan.pi);
  return plan;
}

TransportPlan relaxed_plan_col(const CostMatrix& cost, const Vector& p,
                               double gamma) {
  check_gamma(gamma);
  check_cost(cost);
  check_length(p, cost.cols(), "item");
  TransportPlan plan{Matrix(), gamma, PlanKind::kRelaxedCol};
  col_softmax_scaled(cost.values, gamma, p, plan.pi);
  return plan;
}

TransportPlan relaxed_plan(const CostMatrix& cost, const Marginals& marginals,
                           double gamma) {
  check_gamma(gamma);
  check_cost(cost);
  check_length(marginals.users, cost.rows(), "user");
  check_length(marginals.items, cost.cols(), "item");
  TransportPlan plan{Matrix(), gamma, PlanKind::kRelaxedMax};
  Matrix col;
  row_softmax_scaled(cost.values, gamma, marginals.users, plan.pi);
  col_softmax_scaled(cost.values, gamma, marginals.items, col);
  plan.pi.array() = plan.pi.array().max(col.array());
  return plan;
}

void write_plan_csv(const TransportPlan& plan, std::ostream& out,
                    double threshold) {
  out << "user,item,value\n";
  out.precision(17);
  for (Index u = 0; u < plan.pi.rows(); ++u) {
    for (Index i = 0; i < plan.pi.cols(); ++i) {
      const double v = plan.pi(u, i);
      if (std::abs(v) > threshold) out << u << ',' << i << ',' << v << '\n';
    }
  }
}

}  // namespace prorec
