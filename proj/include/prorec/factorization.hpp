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

#ifndef PROREC_FACTORIZATION_HPP_
#define PROREC_FACTORIZATION_HPP_

#include <cstdint>
#include <vector>

#include "prorec/core.hpp"

namespace prorec {

struct AlsSettings {
  int n_epochs = 10;
  double zeta = 1e-3;
  std::uint64_t seed = 42;
  // Standard deviation of the zero-mean normal initialization.
  double init_scale = 0.1;

  void validate() const;
};

// Random normal factors of the given shape, drawn from `settings.seed`.
FactorModel init_model(Index n_users, Index n_items, Index dim,
                       const AlsSettings& settings);

// One alternation: exact ridge solve for U with V fixed, then for V with the
// new U. Zeros in `x` are treated as observed zeros.
FactorModel als_epoch(const FactorModel& model, const InteractionMatrix& x);

// Fits from a fresh random start. When `objectives` is given it receives the
// objective after each epoch.
FactorModel als_fit(const InteractionMatrix& x, const AlsSettings& settings,
                    Index dim, std::vector<double>* objectives = nullptr);

}  // namespace prorec

#endif  // PROREC_FACTORIZATION_HPP_
