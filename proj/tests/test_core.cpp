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
#include "oracles.hpp"
#include "prorec/core.hpp"
#include "prorec/errors.hpp"

using namespace prorec;

namespace {

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = n(rng);
  return m;
}

FactorModel make_model(Matrix u, Matrix v, double zeta = 0.0) {
  FactorModel m;
  m.users = std::move(u);
  m.items = std::move(v);
  m.zeta = zeta;
  return m;
}

}  // namespace

TEST_CASE("interaction matrix stores sorted positives") {
  InteractionMatrix x(2, 4);
  x.set(0, 3, 1.0);
  x.set(0, 1, 0.5);
  x.set(1, 0, 1.0);
  CHECK(x.nnz() == 3);
  CHECK(x.row(0)[0].item == 1);
  CHECK(x.row(0)[1].item == 3);
  CHECK(x.get(0, 1) == 0.5);
  CHECK(x.get(1, 3) == 0.0);
  CHECK_FALSE(x.is_binary());
  x.set(0, 1, 0.0);
  CHECK(x.nnz() == 2);
  CHECK(x.is_binary());
  CHECK_THROWS_AS(x.set(0, 0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(x.set(2, 0, 1.0), std::out_of_range);
}

TEST_CASE("from_pairs collapses duplicates") {
  const std::vector<std::pair<Index, Index>> pairs{{0, 1}, {0, 1}, {1, 0}};
  const auto x = InteractionMatrix::from_pairs(2, 2, pairs);
  CHECK(x.nnz() == 2);
  CHECK(x.pairs() == std::vector<std::pair<Index, Index>>{{0, 1}, {1, 0}});
  CHECK(InteractionMatrix::from_dense(x.to_dense()) == x);
}

TEST_CASE("predict_scores") {
  SUBCASE("orthogonal vectors") {
    Matrix u(1, 2), v(1, 2);
    u << 1, 0;
    v << 0, 1;
    CHECK(predict_scores(make_model(u, v))(0, 0) == 0.0);
  }
  SUBCASE("identity factors") {
    const Matrix id = Matrix::Identity(2, 2);
    CHECK(predict_scores(make_model(id, id)).isApprox(id));
  }
  SUBCASE("matches loop oracle") {
    std::mt19937_64 rng(1);
    const Matrix u = random_matrix(3, 2, rng), v = random_matrix(4, 2, rng);
    const Matrix got = predict_scores(make_model(u, v));
    CHECK((got - oracle::matmul_t(u, v)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(predict_scores(make_model(Matrix::Zero(2, 2),
                                              Matrix::Zero(2, 3))),
                    ShapeError);
  }
}

TEST_CASE("cost_matrix") {
  const Matrix id = Matrix::Identity(2, 2);
  const CostMatrix c = cost_matrix(make_model(id, id));
  CHECK(c.values.isApprox(-id));
  CHECK(c.provenance == CostProvenance::kInnerProduct);
  CHECK(cost_matrix(make_model(Matrix::Zero(3, 2), id)).values.isZero());

  std::mt19937_64 rng(2);
  const Matrix u = random_matrix(5, 3, rng), v = random_matrix(4, 3, rng);
  const FactorModel m = make_model(u, v);
  CHECK((cost_matrix(m).values + oracle::matmul_t(u, v)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK((cost_matrix(m).values + predict_scores(m)).isZero());
  CHECK(CostMatrix::external(Matrix::Ones(2, 2)).provenance ==
        CostProvenance::kExternal);
}

TEST_CASE("objective") {
  SUBCASE("perfect reconstruction") {
    Matrix u(2, 1), v(2, 1);
    u << 1, 0;
    v << 1, 1;
    const auto x = InteractionMatrix::from_dense(oracle::matmul_t(u, v));
    CHECK(objective(make_model(u, v), x) == doctest::Approx(0.0));
  }
  SUBCASE("zero X, identity factors") {
    const Matrix id = Matrix::Identity(2, 2);
    CHECK(objective(make_model(id, id), InteractionMatrix(2, 2)) ==
          doctest::Approx(2.0));
  }
  SUBCASE("matches double-loop oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    InteractionMatrix x(4, 3);
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 3; ++j) {
        if (unit(rng) < 0.5) x.set(i, j, unit(rng) * 0.9 + 0.1);
      }
    }
    const Matrix u = random_matrix(4, 2, rng), v = random_matrix(3, 2, rng);
    const double want = oracle::objective(x.to_dense(), u, v, 0.3);
    const double got = objective(make_model(u, v, 0.3), x);
    CHECK(std::abs(got - want) <= 1e-12 * want);
  }
  SUBCASE("shape mismatch") {
    const Matrix id = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(objective(make_model(id, id), InteractionMatrix(3, 2)),
                    ShapeError);
  }
}

TEST_CASE("objective is rotation invariant and bounded by the ridge term") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix u = random_matrix(6, 3, rng), v = random_matrix(5, 3, rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(3, 3, rng))
                         .householderQ();
    InteractionMatrix x(6, 5);
    for (Index i = 0; i < 6; ++i) x.set(i, i % 5, 1.0);
    const FactorModel a = make_model(u, v, 0.2);
    const FactorModel b = make_model(u * q, v * q, 0.2);
    const double la = objective(a, x);
    CHECK(std::abs(objective(b, x) - la) <= 1e-9 * la);
    CHECK(la >= regularization(a));
  }
}
