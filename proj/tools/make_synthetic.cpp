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

// prorec_synth: writes a planted-community interaction file.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "prorec/data.hpp"
#include "prorec/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a planted-community implicit-feedback dataset"};
  prorec::Index users = 200, items = 300, communities = 3;
  double density = 0.3;
  std::uint64_t seed = 7;
  std::string out;
  app.add_option("--users", users)->capture_default_str();
  app.add_option("--items", items)->capture_default_str();
  app.add_option("--communities", communities)->capture_default_str();
  app.add_option("--density", density)->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--out", out, "TSV path; stdout if omitted");
  CLI11_PARSE(app, argc, argv);

  try {
    const prorec::Dataset ds =
        prorec::generate_planted(users, items, communities, density, seed);
    if (out.empty()) {
      prorec::write_interactions(ds, ds.interactions, std::cout);
    } else {
      std::ofstream f(out);
      if (!f) {
        std::cerr << "cannot write " << out << '\n';
        return 2;
      }
      prorec::write_interactions(ds, ds.interactions, f);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
