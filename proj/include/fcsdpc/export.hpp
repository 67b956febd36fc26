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

#include <map>
#include <utility>

#include "json.hpp"

#include "fcsdpc/loop.hpp"

namespace fcsdpc {

/// Both predictors and the regularizer weights; matrices as row-major nested arrays.
nlohmann::json predictor_to_json(const SpcPredictor& spc, const ImplicitPredictor& pred,
                                 const RegWeights& w, const WeightConfig& wc, int Np, int Nf);

/// Exact-data rank condition, full row rank and input persistency for one
/// Hankel partition. `usable` is the verdict the collect command acts on.
struct DataQuality {
  RankReport rank;
  int persistency_order = 0;
  bool persistent = false;
  bool noise_free = false;

  /// Noise-free data must meet the exact rank condition; noisy data must give
  /// a full-row-rank data matrix.
  bool usable() const { return persistent && (noise_free ? rank.satisfied : rank.full_row_rank); }
};

nlohmann::json data_quality_to_json(const DataQuality& q, const DataMatrix& D, Eigen::Index n);

/// Step-time statistics (nanoseconds) and mean node counts.
struct TimingEntry {
  TimingSummary time;
  double mean_nodes = 0.0;
  std::uint64_t max_nodes = 0;
};

using TimingTable = std::map<std::pair<Method, int>, TimingEntry>;

TimingEntry timing_entry(std::span<const StepLog> logs);

/// Entries ordered by method, then N_f.
nlohmann::json timing_to_json(const TimingTable& table);

}  // namespace fcsdpc
