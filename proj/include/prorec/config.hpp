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

#ifndef PROREC_CONFIG_HPP_
#define PROREC_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prorec/pipeline.hpp"

namespace prorec {

struct SyntheticSpec {
  Index users = 200;
  Index items = 300;
  Index communities = 3;
  double density = 0.3;
  std::uint64_t seed = 7;
};

struct DatasetSpec {
  std::string path;                        // TSV triplets; empty if synthetic
  std::optional<SyntheticSpec> synthetic;  // used when path is empty
  std::string split = "4:1";               // "none", "4:1" or "5:2:3"
  double noise_ratio = 0.0;                // 0 disables injection
};

struct ExperimentConfig {
  DatasetSpec dataset;
  ProRecConfig prorec;
  std::vector<Index> cutoffs{5, 10, 20};

  nlohmann::ordered_json to_json() const;
};

// Strict parse: unknown keys and ill-typed values throw ConfigError naming
// the dotted field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Resolves a dataset path; relative paths that do not exist are retried under
// $PROREC_DATA_DIR.
std::filesystem::path resolve_data_path(const std::string& path,
                                        const std::filesystem::path& base = {});

// Hyperparameter grid: field name -> candidate values, in declaration order.
struct Grid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t size() const;
  // The k-th point in row-major order (last axis fastest).
  std::vector<std::pair<std::string, double>> point(std::size_t k) const;
};

// Keys: gamma, lambda, beta, zeta, dim, sigma.
Grid parse_grid(const nlohmann::json& j);
// gamma {0.05..0.175} x lambda {0.25, 0.5, 0.75, 1} x beta {1, 5, 10, 20, 50}.
Grid default_grid();
void apply_grid_value(ProRecConfig& config, const std::string& key,
                      double value);

}  // namespace prorec

#endif  // PROREC_CONFIG_HPP_
