// Copyright 2026 The fcsdpc Authors
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

#include "fcsdpc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace fcsdpc {

using nlohmann::json;

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty())
    throw ConfigError(std::string(what) + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(std::string(what) + ": rows must all have " + std::to_string(cols) +
                        " entries");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
      M(i, c) = v.get<double>();
    }
  }
  return M;
}

namespace {

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

/// Full matrix, or {"diag": [...]}.
Matrix weight_from_json(const json& j, const char* what) {
  if (j.is_object()) {
    if (!j.contains("diag")) throw ConfigError(std::string(what) + ": object form needs \"diag\"");
    const Vector d = vector_from_json(j.at("diag"), what);
    if (d.size() == 0) throw ConfigError(std::string(what) + ": empty diagonal");
    return d.asDiagonal();
  }
  return matrix_from_json(j, what);
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_object()) throw ConfigError(std::string("config: '") + key + "' must be an object");
  return doc.at(key);
}

ReferenceSignal reference_from_json(const json& j, Eigen::Index p) {
  if (j.is_null() || (j.is_object() && j.empty())) return ReferenceSignal::constant(Vector::Zero(p));
  const std::string type = get_or<std::string>(j, "type", "constant");
  if (type == "constant") return ReferenceSignal::constant(vector_from_json(j.at("value"), "reference.value"));
  if (type == "sine")
    return ReferenceSignal::sine(vector_from_json(j.at("amplitude"), "reference.amplitude"),
                                 get_or<double>(j, "period", 100.0),
                                 j.contains("offset") ? vector_from_json(j.at("offset"), "reference.offset")
                                                      : Vector(Vector::Zero(p)));
  if (type == "step")
    return ReferenceSignal::step(vector_from_json(j.at("before"), "reference.before"),
                                 vector_from_json(j.at("after"), "reference.after"),
                                 get_or<long>(j, "at", 0));
  throw ConfigError("reference: unknown type '" + type + "' (expected constant|sine|step)");
}

json reference_to_json(const ReferenceSignal& r) {
  switch (r.kind) {
    case ReferenceSignal::Kind::Constant:
      return {{"type", "constant"}, {"value", vector_to_json(r.value)}};
    case ReferenceSignal::Kind::Sine:
      return {{"type", "sine"},
              {"amplitude", vector_to_json(r.amplitude)},
              {"period", r.period},
              {"offset", vector_to_json(r.value)}};
    case ReferenceSignal::Kind::Step:
      return {{"type", "step"},
              {"before", vector_to_json(r.value)},
              {"after", vector_to_json(r.after)},
              {"at", r.at}};
  }
  return nullptr;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg;
  try {
    const json& plant = section(doc, "plant");
    if (!plant.contains("A") || !plant.contains("B") || !plant.contains("C"))
      throw ConfigError("config: plant needs A, B and C");
    try {
      cfg.plant = PlantModel(matrix_from_json(plant.at("A"), "plant.A"),
                             matrix_from_json(plant.at("B"), "plant.B"),
                             matrix_from_json(plant.at("C"), "plant.C"));
    } catch (const DimensionError& e) {
      throw ConfigError(e.what());
    }
    const Eigen::Index m = cfg.plant.m(), p = cfg.plant.p();

    const json& cs = section(doc, "control_set");
    const json levels = cs.contains("levels") ? cs.at("levels") : json({-1.0, 0.0, 1.0});
    std::optional<double> bound;
    if (cs.contains("delta_bound") && !cs.at("delta_bound").is_null())
      bound = cs.at("delta_bound").get<double>();
    if (levels.is_array() && !levels.empty() && levels.front().is_array()) {
      auto per = levels.get<std::vector<std::vector<double>>>();
      if (static_cast<Eigen::Index>(per.size()) != m)
        throw ConfigError("control_set.levels: one list per input channel required");
      cfg.control_set = ControlSet(std::move(per), bound);
    } else {
      cfg.control_set = ControlSet(levels.get<std::vector<double>>(), m, bound);
    }

    const json& hz = section(doc, "horizons");
    cfg.Np = get_or<int>(hz, "N_p", 4);
    if (hz.contains("N_f") && hz.at("N_f").is_array())
      cfg.Nf = hz.at("N_f").get<std::vector<int>>();
    else
      cfg.Nf = {get_or<int>(hz, "N_f", 2)};

    const json& w = section(doc, "weights");
    cfg.weights.Q = w.contains("Q") ? weight_from_json(w.at("Q"), "weights.Q") : Matrix(Matrix::Identity(p, p));
    cfg.weights.R = w.contains("R") ? weight_from_json(w.at("R"), "weights.R")
                                    : Matrix(1e-3 * Matrix::Identity(m, m));
    cfg.weights.lambda_a = get_or<double>(w, "lambda_a", 1e3);
    cfg.weights.kind = regularizer_from_string(get_or<std::string>(w, "regularizer", "projection"));

    const json& data = section(doc, "data");
    cfg.collect_steps = get_or<std::size_t>(data, "collect_steps", 400);
    cfg.snr_db = data.contains("snr_db") && data.at("snr_db").is_null()
                     ? std::nullopt
                     : std::optional<double>(get_or<double>(data, "snr_db", 40.0));
    cfg.data_seed = get_or<std::uint64_t>(data, "seed", 1);

    const json& cl = section(doc, "closed_loop");
    cfg.loop_steps = get_or<std::size_t>(cl, "steps", 800);
    if (cl.contains("methods")) {
      cfg.methods.clear();
      for (const auto& name : cl.at("methods").get<std::vector<std::string>>())
        cfg.methods.push_back(method_from_string(name));
    }
    cfg.reference = reference_from_json(cl.contains("reference") ? cl.at("reference") : json(), p);
    cfg.loop_seed = get_or<std::uint64_t>(cl, "seed", 2);
    if (cl.contains("snr_db") && !cl.at("snr_db").is_null())
      cfg.loop_snr_db = cl.at("snr_db").get<double>();
    cfg.workers = get_or<int>(cl, "workers", 1);
    cfg.enumeration_cap = get_or<std::uint64_t>(cl, "enumeration_cap", kDefaultEnumerationCap);

    const json& out = section(doc, "output");
    cfg.output_directory = get_or<std::string>(out, "directory", "out");
    cfg.trace = get_or<bool>(out, "trace", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json levels = json::array();
  for (Eigen::Index c = 0; c < cfg.control_set.channels(); ++c)
    levels.push_back(cfg.control_set.levels(c));
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  return {
      {"plant",
       {{"A", matrix_to_json(cfg.plant.A())},
        {"B", matrix_to_json(cfg.plant.B())},
        {"C", matrix_to_json(cfg.plant.C())}}},
      {"control_set",
       {{"levels", levels},
        {"delta_bound", cfg.control_set.delta_bound() ? json(*cfg.control_set.delta_bound()) : json()}}},
      {"horizons", {{"N_p", cfg.Np}, {"N_f", cfg.Nf}}},
      {"weights",
       {{"Q", matrix_to_json(cfg.weights.Q)},
        {"R", matrix_to_json(cfg.weights.R)},
        {"lambda_a", cfg.weights.lambda_a},
        {"regularizer", to_string(cfg.weights.kind)}}},
      {"data",
       {{"collect_steps", cfg.collect_steps},
        {"snr_db", cfg.snr_db ? json(*cfg.snr_db) : json()},
        {"seed", cfg.data_seed}}},
      {"closed_loop",
       {{"steps", cfg.loop_steps},
        {"methods", methods},
        {"reference", reference_to_json(cfg.reference)},
        {"seed", cfg.loop_seed},
        {"snr_db", cfg.loop_snr_db ? json(*cfg.loop_snr_db) : json()},
        {"workers", cfg.workers},
        {"enumeration_cap", cfg.enumeration_cap}}},
      {"output", {{"directory", cfg.output_directory}, {"trace", cfg.trace}}},
  };
}

void ExperimentConfig::validate() const {
  const Eigen::Index m = plant.m(), p = plant.p();
  if (control_set.channels() != m)
    throw ConfigError("control_set: " + std::to_string(control_set.channels()) +
                      " channels for a plant with " + std::to_string(m) + " inputs");
  if (Np < 1) throw ConfigError("horizons: N_p must be >= 1");
  if (Nf.empty()) throw ConfigError("horizons: N_f must not be empty");
  for (int nf : Nf)
    if (nf < 1) throw ConfigError("horizons: every N_f must be >= 1");
  if (weights.Q.rows() != p || weights.Q.cols() != p)
    throw ConfigError("weights: Q must be " + std::to_string(p) + "x" + std::to_string(p));
  if (weights.R.rows() != m || weights.R.cols() != m)
    throw ConfigError("weights: R must be " + std::to_string(m) + "x" + std::to_string(m));
  weights.validate();

  const int max_nf = *std::max_element(Nf.begin(), Nf.end());
  const std::size_t min_window = static_cast<std::size_t>(Np + max_nf + 1);
  if (collect_steps < min_window)
    throw ConfigError("data: collect_steps = " + std::to_string(collect_steps) +
                      " is below the minimum window; at least " + std::to_string(min_window) +
                      " steps are required for N_p=" + std::to_string(Np) +
                      ", N_f=" + std::to_string(max_nf));
  if (snr_db && !std::isfinite(*snr_db)) throw ConfigError("data: snr_db must be finite or null");
  if (loop_snr_db && !std::isfinite(*loop_snr_db))
    throw ConfigError("closed_loop: snr_db must be finite or null");
  if (methods.empty()) throw ConfigError("closed_loop: methods must not be empty");
  if (workers < 1) throw ConfigError("closed_loop: workers must be >= 1");
  if (reference.value.size() != p ||
      (reference.kind == ReferenceSignal::Kind::Sine && reference.amplitude.size() != p) ||
      (reference.kind == ReferenceSignal::Kind::Step && reference.after.size() != p))
    throw ConfigError("closed_loop.reference: vectors must have length p = " + std::to_string(p));

  if (std::find(methods.begin(), methods.end(), Method::ENUM) != methods.end()) {
    for (int nf : Nf) {
      double log_count = 0.0;
      for (Eigen::Index c = 0; c < m; ++c) log_count += nf * std::log10(control_set.level_count(c));
      if (log_count > std::log10(static_cast<double>(enumeration_cap)) + 1e-12)
        throw ConfigError("closed_loop: ENUM at N_f=" + std::to_string(nf) + " needs 10^" +
                          std::to_string(log_count) + " candidates, above the cap of " +
                          std::to_string(enumeration_cap));
    }
  }
}

Scenario ExperimentConfig::scenario(int nf) const {
  Scenario s{.plant = plant, .cs = control_set};
  s.Np = Np;
  s.Nf = nf;
  s.collect_Nf = *std::max_element(Nf.begin(), Nf.end());
  s.weights = weights;
  s.collect_steps = collect_steps;
  s.snr_db = snr_db ? *snr_db : std::numeric_limits<double>::infinity();
  s.data_seed = data_seed;
  s.loop_steps = loop_steps;
  s.methods = methods;
  s.reference = reference;
  s.loop_seed = loop_seed;
  s.loop_snr_db = loop_snr_db;
  return s;
}

}  // namespace fcsdpc
