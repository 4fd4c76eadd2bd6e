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

#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "prorec/data.hpp"
#include "prorec/errors.hpp"
#include "prorec/factorization.hpp"
#include "prorec/pipeline.hpp"

using namespace prorec;

namespace {

struct Fixture {
  InteractionMatrix x;
  NoiseLedger ledger;
  Marginals marginals;
};

Fixture noisy_planted(std::uint64_t seed, Index users = 60, Index items = 80) {
  const Dataset ds = generate_planted(users, items, 3, 0.4, seed);
  auto [x, ledger] = inject_noise(ds.interactions, 0.1, seed + 1);
  Fixture f{std::move(x), std::move(ledger), {}};
  f.marginals = popularity_marginals(f.x);
  return f;
}

ProRecConfig small_config() {
  ProRecConfig c;
  c.dim = 8;
  c.outer_max = 6;
  c.als_epochs_per_outer = 5;
  return c;
}

PipelineTrace trace_of(std::initializer_list<double> values) {
  PipelineTrace t;
  int k = 0;
  for (double v : values) {
    IterationRecord r;
    r.iteration = ++k;
    r.objective = v;
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("convergence_check") {
  CHECK(convergence_check(trace_of({10, 10}), 1e-6));
  CHECK_FALSE(convergence_check(trace_of({10, 5}), 1e-6));
  CHECK(convergence_check(trace_of({10, 9.9999999}), 1e-6));
  CHECK_FALSE(convergence_check(trace_of({10}), 1.0));
  CHECK(convergence_check(trace_of({0, 0}), 1e-6));
}

TEST_CASE("config validation names the field") {
  ProRecConfig c;
  c.lambda = 1.2;
  try {
    c.validate();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
  c = ProRecConfig{};
  c.gamma = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ProRecConfig{};
  c.outer_max = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("lambda = 1 reduces to plain ALS") {
  const Fixture f = noisy_planted(30);
  ProRecConfig c = small_config();
  c.lambda = 1.0;
  c.rel_tol = 0.0;
  const ProRecResult r = run_prorec(f.x, f.marginals, c);
  CHECK(r.interactions == f.x);
  for (const auto& rec : r.trace.records) CHECK(rec.relabeled_pairs == 0);

  AlsSettings s;
  s.n_epochs = c.outer_max * c.als_epochs_per_outer;
  s.zeta = c.zeta;
  s.seed = c.seed;
  s.init_scale = c.init_scale;
  const FactorModel plain = als_fit(f.x, s, c.dim);
  CHECK(r.model.users == plain.users);
  CHECK(r.model.items == plain.items);
}

TEST_CASE("threshold none never relabels") {
  const Fixture f = noisy_planted(31);
  ProRecConfig c = small_config();
  c.threshold = ThresholdKind::kNone;
  const ProRecResult r = run_prorec(f.x, f.marginals, c);
  CHECK(r.interactions == f.x);
  for (const auto& rec : r.trace.records) {
    CHECK(rec.relabeled_pairs == 0);
    CHECK(rec.flagged_pairs == 0);
  }
}

TEST_CASE("objective trace is non-increasing") {
  for (std::uint64_t seed : {32, 33, 34}) {
    const Fixture f = noisy_planted(seed);
    for (TransportKind kind :
         {TransportKind::kRelaxedMax, TransportKind::kSinkhorn}) {
      ProRecConfig c = small_config();
      c.transport = kind;
      c.rel_tol = 0.0;
      c.seed = seed;
      const ProRecResult r = run_prorec(f.x, f.marginals, c);
      REQUIRE(r.trace.records.size() >= 5);
      CHECK_FALSE(r.trace.monotone_violation);
      const auto obj = r.trace.objectives();
      for (std::size_t t = 1; t < obj.size(); ++t) {
        CHECK(obj[t] <= obj[t - 1] + 1e-8 * obj.front());
      }
    }
  }
}

TEST_CASE("blended values stay within [lambda^t, 1] on the original support") {
  const Fixture f = noisy_planted(35);
  ProRecConfig c = small_config();
  c.lambda = 0.6;
  c.rel_tol = 0.0;
  const ProRecResult r = run_prorec(f.x, f.marginals, c);
  const double floor = std::pow(c.lambda, c.outer_max);
  CHECK(r.interactions.nnz() == f.x.nnz());
  for (Index u = 0; u < f.x.n_users(); ++u) {
    for (const auto& e : r.interactions.row(u)) {
      CHECK(f.x.contains(u, e.item));
      CHECK(e.value >= floor - 1e-12);
      CHECK(e.value <= 1.0);
    }
  }
}

TEST_CASE("deterministic for a fixed seed") {
  const Fixture f = noisy_planted(36);
  const ProRecConfig c = small_config();
  const ProRecResult a = run_prorec(f.x, f.marginals, c);
  const ProRecResult b = run_prorec(f.x, f.marginals, c);
  std::ostringstream ta, tb;
  write_trace_jsonl(a.trace, ta, false);
  write_trace_jsonl(b.trace, tb, false);
  CHECK(ta.str() == tb.str());
  CHECK(a.interactions == b.interactions);
}

TEST_CASE("pairs below one half fall as lambda grows") {
  const Fixture f = noisy_planted(37);
  Index previous = std::numeric_limits<Index>::max();
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    ProRecConfig c = small_config();
    c.outer_max = 1;
    c.lambda = lambda;
    const ProRecResult r = run_prorec(f.x, f.marginals, c);
    Index below = 0;
    for (Index u = 0; u < r.interactions.n_users(); ++u) {
      for (const auto& e : r.interactions.row(u)) below += e.value < 0.5;
    }
    CHECK(below <= previous);
    previous = below;
  }
}

TEST_CASE("external cost provider and other transports") {
  const Fixture f = noisy_planted(38, 12, 15);
  ProRecConfig c = small_config();
  c.outer_max = 2;
  int calls = 0;
  const ProRecResult r = run_prorec(
      f.x, f.marginals, c, [&](const FactorModel& m) {
        ++calls;
        return CostMatrix::external(-predict_scores(m));
      });
  CHECK(calls == static_cast<int>(r.trace.records.size()));

  c.transport = TransportKind::kEmdSmall;
  const ProRecResult emd = run_prorec(f.x, f.marginals, c);
  CHECK(emd.plan.kind == PlanKind::kEmd);

  c.transport = TransportKind::kRelaxedMax;
  c.threshold = ThresholdKind::kGlobal;
  c.sigma = 2;
  const ProRecResult global = run_prorec(f.x, f.marginals, c);
  CHECK(global.trace.records.front().flagged_pairs > 0);

  CHECK_THROWS_AS(
      run_prorec(f.x, f.marginals, c,
                 [](const FactorModel&) {
                   return CostMatrix::external(Matrix::Zero(2, 2));
                 }),
      ShapeError);
}

TEST_CASE("trace serialization") {
  PipelineTrace t = trace_of({3.0, 2.0});
  t.records[0].seconds_transport = 0.5;
  std::ostringstream with, without;
  write_trace_jsonl(t, with, true);
  write_trace_jsonl(t, without, false);
  std::istringstream in(with.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["iteration"] == n + 1);
    CHECK(j.contains("seconds_transport"));
    ++n;
  }
  CHECK(n == 2);
  CHECK(without.str().find("seconds") == std::string::npos);
}

TEST_CASE("bad inputs") {
  const Fixture f = noisy_planted(39, 10, 10);
  ProRecConfig c = small_config();
  CHECK_THROWS_AS(run_prorec(InteractionMatrix(10, 10), f.marginals, c),
                  DataError);
  Marginals wrong = f.marginals;
  wrong.users.conservativeResize(9);
  CHECK_THROWS_AS(run_prorec(f.x, wrong, c), ShapeError);
}
