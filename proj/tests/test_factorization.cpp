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

#include <random>

#include "doctest.h"
#include "prorec/core.hpp"
#include "prorec/errors.hpp"
#include "prorec/factorization.hpp"

using namespace prorec;

namespace {

InteractionMatrix random_binary(Index rows, Index cols, double density,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  InteractionMatrix x(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (coin(rng)) x.set(i, j, 1.0);
    }
  }
  return x;
}

}  // namespace

TEST_CASE("identity is fit exactly at full rank") {
  const auto x = InteractionMatrix::from_dense(Matrix::Identity(2, 2));
  AlsSettings s;
  s.zeta = 0.0;
  s.n_epochs = 50;
  std::vector<double> trace;
  const FactorModel m = als_fit(x, s, 2, &trace);
  CHECK(trace.back() < 1e-6);
  for (std::size_t t = 1; t < trace.size(); ++t) {
    CHECK(trace[t] <= trace[t - 1] + 1e-9);
  }
  CHECK(m.all_finite());
}

TEST_CASE("all-zero X shrinks to zero") {
  AlsSettings s;
  s.zeta = 0.1;
  s.n_epochs = 20;
  const FactorModel m = als_fit(InteractionMatrix(5, 4), s, 3);
  CHECK(m.users.norm() < 1e-8);
  CHECK(m.items.norm() < 1e-8);
  CHECK(objective(m, InteractionMatrix(5, 4)) < 1e-12);
}

TEST_CASE("rank-1 fit approaches a long reference run") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector u(12), v(9);
  for (auto& e : u) e = unit(rng);
  for (auto& e : v) e = unit(rng);
  InteractionMatrix x(12, 9);
  for (Index i = 0; i < 12; ++i) {
    for (Index j = 0; j < 9; ++j) {
      if (u(i) * v(j) > 0.25) x.set(i, j, 1.0);
    }
  }
  AlsSettings s;
  s.zeta = 1e-4;
  s.n_epochs = 500;
  const double reference = objective(als_fit(x, s, 1), x);
  s.n_epochs = 10;
  const double got = objective(als_fit(x, s, 1), x);
  CHECK(got <= reference * 1.05 + 1e-12);
}

TEST_CASE("als_epoch") {
  const InteractionMatrix x = random_binary(15, 10, 0.3, 6);
  AlsSettings s;
  const FactorModel start = init_model(15, 10, 4, s);

  SUBCASE("first epoch decreases the objective") {
    CHECK(objective(als_epoch(start, x), x) < objective(start, x));
  }
  SUBCASE("fixed point stays put") {
    // X = I with U = V = I and no ridge is an exact fixed point.
    InteractionMatrix eye(2, 2);
    eye.set(0, 0, 1.0);
    eye.set(1, 1, 1.0);
    FactorModel m;
    m.users = Matrix::Identity(2, 2);
    m.items = Matrix::Identity(2, 2);
    m.zeta = 0.0;
    const FactorModel next = als_epoch(m, eye);
    CHECK((next.users - m.users).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((next.items - m.items).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("huge ridge shrinks the factors") {
    FactorModel m = start;
    m.zeta = 1e6;
    const FactorModel next = als_epoch(m, x);
    CHECK(next.users.norm() < m.users.norm());
    CHECK(next.items.norm() < m.items.norm());
  }
  SUBCASE("rows satisfy the ridge normal equations") {
    const FactorModel next = als_epoch(start, x);
    const Matrix dense = x.to_dense();
    const Matrix& u = next.users;
    const Matrix& v = next.items;
    // V was solved last against the new U.
    const Matrix gram = u.transpose() * u +
                        s.zeta * Matrix::Identity(u.cols(), u.cols());
    for (Index j = 0; j < v.rows(); ++j) {
      const Vector resid =
          gram * v.row(j).transpose() - u.transpose() * dense.col(j);
      CHECK(resid.norm() < 1e-8);
    }
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(als_epoch(start, InteractionMatrix(3, 3)), ShapeError);
  }
}

TEST_CASE("monotone over random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const InteractionMatrix x = random_binary(20, 14, 0.25, 100 + seed);
    AlsSettings s;
    s.seed = seed;
    s.n_epochs = 15;
    s.zeta = seed % 2 ? 1e-3 : 0.5;
    std::vector<double> trace;
    als_fit(x, s, 5, &trace);
    for (std::size_t t = 1; t < trace.size(); ++t) {
      CHECK(trace[t] <= trace[t - 1] + 1e-9);
    }
  }
}

TEST_CASE("rank-deficient zero-ridge solve retries with a small ridge") {
  // Identical item embeddings make V^T V singular on the U-step.
  FactorModel m;
  m.users = Matrix::Zero(3, 2);
  m.users.col(0).setOnes();
  m.items = Matrix::Ones(2, 2);
  m.zeta = 0.0;
  InteractionMatrix x(3, 2);
  x.set(0, 0, 1.0);
  const auto before = warning_count();
  const FactorModel next = als_epoch(m, x);
  CHECK(next.all_finite());
  CHECK(warning_count() > before);
}

TEST_CASE("settings validation") {
  AlsSettings s;
  s.n_epochs = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = AlsSettings{};
  s.init_scale = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = AlsSettings{};
  s.zeta = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
