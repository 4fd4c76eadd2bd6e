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

#include "prorec/factorization.hpp"

#include <random>
#include <string>

#include "prorec/errors.hpp"

namespace prorec {

void AlsSettings::validate() const {
  if (n_epochs < 1) throw ConfigError("als n_epochs must be >= 1");
  if (!(zeta >= 0.0)) throw ConfigError("als zeta must be >= 0");
  if (!(init_scale > 0.0)) throw ConfigError("als init_scale must be > 0");
}

FactorModel init_model(Index n_users, Index n_items, Index dim,
                       const AlsSettings& settings) {
  settings.validate();
  if (n_users < 1 || n_items < 1) {
    throw ShapeError("factorization needs at least one user and one item");
  }
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> normal(0.0, settings.init_scale);
  FactorModel model;
  model.zeta = settings.zeta;
  model.users.resize(n_users, dim);
  model.items.resize(n_items, dim);
  for (Index k = 0; k < model.users.size(); ++k) {
    model.users.data()[k] = normal(rng);
  }
  for (Index k = 0; k < model.items.size(); ++k) {
    model.items.data()[k] = normal(rng);
  }
  return model;
}

namespace {

// Solves rows of `target` against the Gram system (F^T F + zeta I) w = F^T x.
// `rhs` holds F^T x for every row as columns. Every row shares one system
// because zeros are observed, so a failure is reported against row 0.
Matrix solve_rows(const Matrix& fixed, const Matrix& rhs, double zeta,
                  const char* side) {
  const Index d = fixed.cols();
  Matrix gram = fixed.transpose() * fixed;
  auto try_solve = [&](double ridge, Matrix* out) {
    Matrix system = gram;
    system.diagonal().array() += ridge;
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) return false;
    *out = llt.solve(rhs);
    // LLT accepts some numerically singular systems; catch them here.
    if (!out->allFinite()) return false;
    const double scale = system.diagonal().cwiseAbs().maxCoeff();
    const double min_pivot =
        llt.matrixL().toDenseMatrix().diagonal().cwiseAbs().minCoeff();
    return min_pivot * min_pivot > 1e-14 * (scale > 0 ? scale : 1.0);
  };
  Matrix solution(d, rhs.cols());
  if (try_solve(zeta, &solution)) return solution.transpose();
  if (zeta == 0.0) {
    warn(std::string("singular normal equations for ") + side +
         " rows; retrying with ridge 1e-8");
    if (try_solve(1e-8, &solution)) return solution.transpose();
  }
  throw SingularSystemError(
      std::string("singular normal equations solving ") + side + " row 0",
      0);
}

}  // namespace

FactorModel als_epoch(const FactorModel& model, const InteractionMatrix& x) {
  if (model.users.cols() != model.items.cols()) {
    throw ShapeError("embedding dimensions of U and V differ");
  }
  if (model.n_users() != x.n_users() || model.n_items() != x.n_items()) {
    throw ShapeError("model shape does not match the interaction matrix");
  }
  const Index d = model.dim();
  FactorModel next = model;

  // U-step: rhs column u = V^T x_u.
  Matrix rhs = Matrix::Zero(d, x.n_users());
  for (Index u = 0; u < x.n_users(); ++u) {
    for (const auto& e : x.row(u)) {
      rhs.col(u) += e.value * next.items.row(e.item).transpose();
    }
  }
  next.users = solve_rows(next.items, rhs, model.zeta, "user");

  // V-step: rhs column i = U^T x_{:,i}.
  rhs.setZero(d, x.n_items());
  for (Index u = 0; u < x.n_users(); ++u) {
    for (const auto& e : x.row(u)) {
      rhs.col(e.item) += e.value * next.users.row(u).transpose();
    }
  }
  next.items = solve_rows(next.users, rhs, model.zeta, "item");

  if (!next.all_finite()) {
    throw NumericalError("non-finite embeddings after ALS epoch");
  }
  return next;
}

FactorModel als_fit(const InteractionMatrix& x, const AlsSettings& settings,
                    Index dim, std::vector<double>* objectives) {
  FactorModel model = init_model(x.n_users(), x.n_items(), dim, settings);
  if (objectives) objectives->clear();
  for (int epoch = 0; epoch < settings.n_epochs; ++epoch) {
    model = als_epoch(model, x);
    if (objectives) objectives->push_back(objective(model, x));
  }
  return model;
}

}  // namespace prorec
