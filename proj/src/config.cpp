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

#include "prorec/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "prorec/errors.hpp"

namespace prorec {

using nlohmann::json;

namespace {

// Walks one JSON object, rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config field '" + where() +
                                           "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError("unknown config key '" + field(key) + "'");
      }
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.get<long long>() < 0) throw ConfigError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config field '" + field(key) + "' has the wrong type");
    }
  }

  const json& at(const std::string& key) { return j_.at(key); }
  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

TransportKind parse_transport(const std::string& s) {
  if (s == "sinkhorn") return TransportKind::kSinkhorn;
  if (s == "relaxed-max") return TransportKind::kRelaxedMax;
  if (s == "emd-small") return TransportKind::kEmdSmall;
  throw ConfigError("config field 'prorec.transport' must be sinkhorn, "
                    "relaxed-max or emd-small; got '" + s + "'");
}

ThresholdKind parse_threshold(const std::string& s) {
  if (s == "personalized") return ThresholdKind::kPersonalized;
  if (s == "global") return ThresholdKind::kGlobal;
  if (s == "none") return ThresholdKind::kNone;
  throw ConfigError("config field 'prorec.threshold' must be personalized, "
                    "global or none; got '" + s + "'");
}

ScoreScope parse_scope(const std::string& s) {
  if (s == "positives") return ScoreScope::kPositives;
  if (s == "all") return ScoreScope::kAllItems;
  throw ConfigError("config field 'prorec.scope' must be positives or all; "
                    "got '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  ProRecConfig& p = cfg.prorec;
  {
    Section root(j, "");
    root.read("seed", p.seed);
    if (root.has("dataset")) {
      Section ds(root.at("dataset"), "dataset");
      ds.read("path", cfg.dataset.path);
      ds.read("split", cfg.dataset.split);
      ds.read("noise_ratio", cfg.dataset.noise_ratio);
      if (ds.has("synthetic")) {
        SyntheticSpec syn;
        Section s(ds.at("synthetic"), "dataset.synthetic");
        s.read("users", syn.users);
        s.read("items", syn.items);
        s.read("communities", syn.communities);
        s.read("density", syn.density);
        s.read("seed", syn.seed);
        cfg.dataset.synthetic = syn;
      }
    }
    if (root.has("model")) {
      Section m(root.at("model"), "model");
      m.read("dim", p.dim);
      m.read("zeta", p.zeta);
      m.read("als_epochs_per_outer", p.als_epochs_per_outer);
      m.read("init_scale", p.init_scale);
    }
    if (root.has("prorec")) {
      Section s(root.at("prorec"), "prorec");
      s.read("gamma", p.gamma);
      s.read("lambda", p.lambda);
      s.read("beta", p.beta);
      s.read("outer_max", p.outer_max);
      s.read("rel_tol", p.rel_tol);
      s.read("sigma", p.sigma);
      std::string text;
      if (s.has("transport")) {
        s.read("transport", text);
        p.transport = parse_transport(text);
      }
      if (s.has("threshold")) {
        s.read("threshold", text);
        p.threshold = parse_threshold(text);
      }
      if (s.has("scope")) {
        s.read("scope", text);
        p.scope = parse_scope(text);
      }
    }
    if (root.has("sinkhorn")) {
      Section s(root.at("sinkhorn"), "sinkhorn");
      s.read("max_iters", p.sinkhorn.max_iters);
      s.read("tol", p.sinkhorn.tol);
    }
    if (root.has("eval")) {
      Section e(root.at("eval"), "eval");
      if (e.has("cutoffs")) {
        const json& c = e.at("cutoffs");
        if (!c.is_array() || c.empty()) {
          throw ConfigError("config field 'eval.cutoffs' must be a nonempty "
                            "array of integers");
        }
        cfg.cutoffs.clear();
        for (const auto& v : c) {
          if (!v.is_number_integer() || v.get<long long>() < 1) {
            throw ConfigError("config field 'eval.cutoffs' must hold "
                              "positive integers");
          }
          cfg.cutoffs.push_back(v.get<Index>());
        }
      }
    }
  }
  const std::string& split = cfg.dataset.split;
  if (split != "none" && split != "4:1" && split != "5:2:3") {
    throw ConfigError("config field 'dataset.split' must be none, 4:1 or "
                      "5:2:3");
  }
  if (!(cfg.dataset.noise_ratio >= 0.0 && cfg.dataset.noise_ratio < 1.0)) {
    throw ConfigError("config field 'dataset.noise_ratio' must lie in [0, 1)");
  }
  if (cfg.dataset.path.empty() && !cfg.dataset.synthetic) {
    cfg.dataset.synthetic = SyntheticSpec{};
  }
  p.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  ExperimentConfig cfg = parse_config(j);
  if (!cfg.dataset.path.empty()) {
    cfg.dataset.path =
        resolve_data_path(cfg.dataset.path, path.parent_path()).string();
  }
  return cfg;
}

std::filesystem::path resolve_data_path(const std::string& path,
                                        const std::filesystem::path& base) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute() || fs::exists(p)) return p;
  if (!base.empty() && fs::exists(base / p)) return base / p;
  if (const char* root = std::getenv("PROREC_DATA_DIR")) {
    if (fs::exists(fs::path(root) / p)) return fs::path(root) / p;
  }
  return p;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  const ProRecConfig& p = prorec;
  j["seed"] = p.seed;
  auto& ds = j["dataset"];
  if (!dataset.path.empty()) ds["path"] = dataset.path;
  if (dataset.synthetic) {
    const auto& s = *dataset.synthetic;
    ds["synthetic"] = {{"users", s.users},
                       {"items", s.items},
                       {"communities", s.communities},
                       {"density", s.density},
                       {"seed", s.seed}};
  }
  ds["split"] = dataset.split;
  ds["noise_ratio"] = dataset.noise_ratio;
  j["model"] = {{"dim", p.dim},
                {"zeta", p.zeta},
                {"als_epochs_per_outer", p.als_epochs_per_outer},
                {"init_scale", p.init_scale}};
  j["prorec"] = {{"gamma", p.gamma},
                 {"lambda", p.lambda},
                 {"beta", p.beta},
                 {"outer_max", p.outer_max},
                 {"rel_tol", p.rel_tol},
                 {"transport", to_string(p.transport)},
                 {"threshold", to_string(p.threshold)},
                 {"sigma", p.sigma},
                 {"scope", to_string(p.scope)}};
  j["sinkhorn"] = {{"max_iters", p.sinkhorn.max_iters},
                   {"tol", p.sinkhorn.tol}};
  j["eval"] = {{"cutoffs", cutoffs}};
  return j;
}

std::size_t Grid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& [name, values] : axes) n *= values.size();
  return n;
}

std::vector<std::pair<std::string, double>> Grid::point(std::size_t k) const {
  std::vector<std::pair<std::string, double>> out(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto& values = axes[a].second;
    out[a] = {axes[a].first, values[k % values.size()]};
    k /= values.size();
  }
  return out;
}

namespace {
const std::set<std::string> kGridKeys = {"gamma", "lambda", "beta",
                                         "zeta",  "dim",    "sigma"};
}  // namespace

Grid parse_grid(const json& j) {
  if (!j.is_object() || j.empty()) {
    throw ConfigError("grid must be a nonempty object of value lists");
  }
  Grid grid;
  for (const auto& [key, values] : j.items()) {
    if (!kGridKeys.count(key)) {
      throw ConfigError("unknown grid key '" + key + "'");
    }
    if (!values.is_array() || values.empty()) {
      throw ConfigError("grid axis '" + key + "' must be a nonempty array");
    }
    std::vector<double> axis;
    for (const auto& v : values) {
      if (!v.is_number()) {
        throw ConfigError("grid axis '" + key + "' must hold numbers");
      }
      axis.push_back(v.get<double>());
    }
    grid.axes.emplace_back(key, std::move(axis));
  }
  return grid;
}

Grid default_grid() {
  Grid g;
  g.axes = {{"gamma", {0.05, 0.075, 0.1, 0.125, 0.15, 0.175}},
            {"lambda", {0.25, 0.5, 0.75, 1.0}},
            {"beta", {1, 5, 10, 20, 50}}};
  return g;
}

void apply_grid_value(ProRecConfig& config, const std::string& key,
                      double value) {
  auto as_index = [&]() {
    if (value != std::floor(value)) {
      throw ConfigError("grid axis '" + key + "' must hold integers");
    }
    return static_cast<Index>(value);
  };
  if (key == "gamma") config.gamma = value;
  else if (key == "lambda") config.lambda = value;
  else if (key == "beta") config.beta = value;
  else if (key == "zeta") config.zeta = value;
  else if (key == "dim") config.dim = as_index();
  else if (key == "sigma") config.sigma = as_index();
  else throw ConfigError("unknown grid key '" + key + "'");
}

}  // namespace prorec
