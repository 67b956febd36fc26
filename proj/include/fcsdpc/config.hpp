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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fcsdpc/loop.hpp"

namespace fcsdpc {

/// Everything an experiment needs, parsed from one JSON document.
struct ExperimentConfig {
  PlantModel plant{Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
  ControlSet control_set{std::vector<double>{0.0}, 1};

  int Np = 4;
  std::vector<int> Nf{2};

  WeightConfig weights;

  std::size_t collect_steps = 400;
  std::optional<double> snr_db = 40.0;  ///< empty: noise-free data
  std::uint64_t data_seed = 1;

  std::size_t loop_steps = 800;
  std::vector<Method> methods{Method::SDA, Method::ENUM};
  ReferenceSignal reference;
  std::uint64_t loop_seed = 2;
  std::optional<double> loop_snr_db;
  int workers = 1;

  std::string output_directory = "out";
  bool trace = false;

  std::uint64_t enumeration_cap = kDefaultEnumerationCap;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError on inconsistent dimensions or out-of-range values.
  void validate() const;

  /// Scenario for one prediction horizon.
  Scenario scenario(int Nf) const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

nlohmann::json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const nlohmann::json& j, const char* what);

}  // namespace fcsdpc
