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

// Reference implementations used only by tests. Each one solves its problem
// by a different route than the library: explicit loops, iterative
// minimization or a generic LP, never the closed forms under test.

#ifndef PROREC_TESTS_ORACLES_HPP_
#define PROREC_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix matmul_t(const Matrix& u, const Matrix& v) {
  Matrix out(u.rows(), v.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.rows(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < u.cols(); ++k) s += u(i, k) * v(j, k);
      out(i, j) = s;
    }
  }
  return out;
}

inline double objective(const Matrix& x, const Matrix& u, const Matrix& v,
                        double zeta) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double dot = 0.0;
      for (Eigen::Index k = 0; k < u.cols(); ++k) dot += u(i, k) * v(j, k);
      s += (x(i, j) - dot) * (x(i, j) - dot);
    }
  }
  double norms = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) norms += u.data()[k] * u.data()[k];
  for (Eigen::Index k = 0; k < v.size(); ++k) norms += v.data()[k] * v.data()[k];
  return s + zeta * norms;
}

// Euclidean projection onto {x : x_j >= lo, sum x = total} by sorting.
inline std::vector<double> project(const std::vector<double>& y, double total,
                                   double lo) {
  const std::size_t n = y.size();
  const double budget = total - lo * static_cast<double>(n);
  std::vector<double> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = y[j] - lo;
  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // The first support index always qualifies; seeding tau with it guards
  // against cancellation when y holds huge entries.
  double cum = 0.0, tau = sorted[0] - budget;
  for (std::size_t k = 0; k < n; ++k) {
    cum += sorted[k];
    const double t = (cum - budget) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) tau = t;
  }
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::max(z[j] - tau, 0.0) + lo;
  return x;
}

struct EntropicResult {
  std::vector<double> x;
  int iterations = 0;
  double stationarity = 0.0;
};

// min_x sum_j c_j x_j + gamma sum_j x_j (log x_j - 1)
// s.t. sum_j x_j = mass, x_j >= 1e-300.
// Projected gradient in the metric diag(x / gamma): the step is projected
// onto sum d = 0, damped to stay inside the positive orthant, and
// backtracked until Armijo holds. Stops when the projected step falls below
// `tol` in the max norm.
inline EntropicResult entropic_minimize(const std::vector<double>& c,
                                        double mass, double gamma,
                                        double tol = 1e-10,
                                        int max_iters = 10000) {
  const double lo = 1e-300;
  const std::size_t n = c.size();
  auto f = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += c[j] * x[j] + gamma * x[j] * (std::log(x[j]) - 1.0);
    }
    return s;
  };

  EntropicResult r;
  std::vector<double> x(n, mass / static_cast<double>(n));
  std::vector<double> g(n), d(n), next(n);
  for (r.iterations = 0; r.iterations < max_iters; ++r.iterations) {
    double dg = 0.0, dsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      g[j] = c[j] + gamma * std::log(x[j]);
      const double w = x[j] / gamma;
      dg += w * g[j];
      dsum += w;
    }
    const double nu = dg / dsum;
    double stat = 0.0, slope = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = -(x[j] / gamma) * (g[j] - nu);
      stat = std::max(stat, std::abs(d[j]));
      slope += g[j] * d[j];
    }
    r.stationarity = stat;
    if (stat < tol) break;

    // Never shrink an entry by more than 99% in one step.
    double step = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (d[j] < 0.0) step = std::min(step, -0.99 * x[j] / d[j]);
    }
    const double fx = f(x);
    for (int k = 0; k < 100; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        next[j] = std::max(x[j] + step * d[j], lo);
      }
      if (f(next) <= fx + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    x = next;
  }
  r.x = std::move(x);
  return r;
}

// Dense two-phase simplex with Bland's rule for
//   min c^T x  s.t.  A x = b, x >= 0   (b >= 0).
// Returns the optimal value; `x` receives the solution.
inline double simplex(const Matrix& a, const Vector& b, const Vector& c,
                      Vector* x_out = nullptr) {
  const Eigen::Index m = a.rows(), n = a.cols();
  // Columns: n originals, m artificials, then rhs.
  Matrix t = Matrix::Zero(m + 1, n + m + 1);
  t.block(0, 0, m, n) = a;
  t.block(0, n, m, m) = Matrix::Identity(m, m);
  t.block(0, n + m, m, 1) = b;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  std::iota(basis.begin(), basis.end(), n);
  const double eps = 1e-12;

  auto pivot = [&](Eigen::Index row, Eigen::Index col) {
    t.row(row) /= t(row, col);
    for (Eigen::Index r = 0; r <= m; ++r) {
      if (r != row && t(r, col) != 0.0) t.row(r) -= t(r, col) * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  };
  auto run = [&](Eigen::Index allowed) {
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t(m, j) < -eps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < m; ++r) {
        if (t(r, enter) > eps) best = std::min(best, t(r, n + m) / t(r, enter));
      }
      Eigen::Index leave = -1;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (t(r, enter) > eps && t(r, n + m) / t(r, enter) <= best + eps &&
            (leave < 0 || basis[static_cast<std::size_t>(r)] <
                              basis[static_cast<std::size_t>(leave)])) {
          leave = r;
        }
      }
      if (leave < 0) return;  // unbounded; cannot happen for transport
      pivot(leave, enter);
    }
  };

  // Phase 1: minimize the sum of artificials.
  t.row(m).setZero();
  for (Eigen::Index r = 0; r < m; ++r) t.row(m) -= t.row(r);
  for (Eigen::Index r = 0; r < m; ++r) t(m, n + r) = 0.0;
  run(n);

  // Phase 2: original costs, reduced against the current basis.
  t.row(m).setZero();
  t.block(m, 0, 1, n) = c.transpose();
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index j = basis[static_cast<std::size_t>(r)];
    if (j < n && t(m, j) != 0.0) t.row(m) -= t(m, j) * t.row(r);
  }
  run(n);

  Vector x = Vector::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index j = basis[static_cast<std::size_t>(r)];
    if (j < n) x(j) = t(r, n + m);
  }
  if (x_out) *x_out = x;
  return c.dot(x);
}

// Exact OT cost of a small instance through `simplex`. q: row masses, p:
// column masses.
inline double ot_lp(const Matrix& cost, const Vector& q, const Vector& p) {
  const Eigen::Index rows = cost.rows(), cols = cost.cols();
  Matrix a = Matrix::Zero(rows + cols, rows * cols);
  Vector b(rows + cols);
  Vector c(rows * cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Eigen::Index v = i * cols + j;
      a(i, v) = 1.0;
      a(rows + j, v) = 1.0;
      c(v) = cost(i, j);
    }
  }
  b << q, p;
  return simplex(a, b, c);
}

// Definition-level SSE of splitting a descending vector after eta items.
inline double naive_sse(const std::vector<double>& rho, std::size_t eta) {
  auto seg = [&](std::size_t from, std::size_t to) {
    double mean = 0.0;
    for (std::size_t k = from; k < to; ++k) mean += rho[k];
    mean /= static_cast<double>(to - from);
    double s = 0.0;
    for (std::size_t k = from; k < to; ++k) {
      s += (rho[k] - mean) * (rho[k] - mean);
    }
    return s;
  };
  return seg(0, eta) + seg(eta, rho.size());
}

// Exhaustive split with the library's documented tie rule: values within
// 1e-12 * sum(rho^2) of the minimum tie, and the smallest eta wins.
inline std::size_t naive_cart(const std::vector<double>& rho) {
  std::vector<double> sse;
  for (std::size_t eta = 1; eta < rho.size(); ++eta) {
    sse.push_back(naive_sse(rho, eta));
  }
  double scale = 0.0;
  for (double v : rho) scale += v * v;
  const double best = *std::min_element(sse.begin(), sse.end());
  for (std::size_t k = 0; k < sse.size(); ++k) {
    if (sse[k] <= best + 1e-12 * scale) return k + 1;
  }
  return 1;
}

}  // namespace oracle

#endif  // PROREC_TESTS_ORACLES_HPP_
