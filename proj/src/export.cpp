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

#include "fcsdpc/export.hpp"

#include "fcsdpc/config.hpp"

namespace fcsdpc {

using nlohmann::json;

namespace {

json vec(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

json predictor_to_json(const SpcPredictor& spc, const ImplicitPredictor& pred, const RegWeights& w,
                       const WeightConfig& wc, int Np, int Nf) {
  json warnings = w.warnings;
  for (const auto& s : pred.warnings) warnings.push_back(s);
  return {
      {"N_p", Np},
      {"N_f", Nf},
      {"regularizer", to_string(wc.kind)},
      {"lambda_a", wc.lambda_a},
      {"spc", {{"O", matrix_to_json(spc.O)}, {"T", matrix_to_json(spc.T)}}},
      {"implicit",
       {{"O", matrix_to_json(pred.O)},
        {"T", matrix_to_json(pred.T)},
        {"g", vec(pred.g)},
        {"dO", matrix_to_json(pred.dO)},
        {"dT", matrix_to_json(pred.dT)},
        {"ref_gain", matrix_to_json(pred.ref_gain)}}},
      {"weights", {{"Q_reg", matrix_to_json(w.Q_reg)}, {"R_reg", matrix_to_json(w.R_reg)}}},
      {"conditioning",
       {{"Q_inner", w.cond_Q_inner},
        {"R_inner", w.cond_R_inner},
        {"gram", w.cond_gram},
        {"blend", pred.cond_blend}}},
      {"warnings", warnings},
  };
}

json data_quality_to_json(const DataQuality& q, const DataMatrix& D, Eigen::Index n) {
  const RankReport& r = q.rank;
  return {
      {"N_p", D.Np},
      {"N_f", D.Nf},
      {"m", D.m},
      {"p", D.p},
      {"n", n},
      {"columns", D.columns()},
      {"noise_free", q.noise_free},
      {"exact_rank",
       {{"numerical_rank", r.numerical_rank}, {"target", r.target}, {"satisfied", r.satisfied}}},
      {"full_row_rank",
       {{"numerical_rank", r.stacked_rank}, {"rows", r.stacked_rows}, {"satisfied", r.full_row_rank}}},
      {"persistency", {{"order", q.persistency_order}, {"satisfied", q.persistent}}},
      {"usable", q.usable()},
  };
}

TimingEntry timing_entry(std::span<const StepLog> logs) {
  TimingEntry e;
  std::vector<double> ns;
  ns.reserve(logs.size());
  double nodes = 0.0;
  for (const StepLog& l : logs) {
    ns.push_back(static_cast<double>(l.step_time.count()));
    nodes += static_cast<double>(l.solve.nodes_explored);
    e.max_nodes = std::max(e.max_nodes, l.solve.nodes_explored);
  }
  e.time = summarize(std::move(ns));
  if (!logs.empty()) e.mean_nodes = nodes / static_cast<double>(logs.size());
  return e;
}

json timing_to_json(const TimingTable& table) {
  json entries = json::array();
  for (const auto& [key, e] : table) {
    entries.push_back({
        {"method", to_string(key.first)},
        {"N_f", key.second},
        {"count", e.time.count},
        {"min_ns", e.time.min},
        {"q25_ns", e.time.q25},
        {"median_ns", e.time.median},
        {"q75_ns", e.time.q75},
        {"max_ns", e.time.max},
        {"outliers_ns", e.time.outliers},
        {"mean_nodes", e.mean_nodes},
        {"max_nodes", e.max_nodes},
    });
  }
  return {{"unit", "ns"}, {"entries", entries}};
}

}  // namespace fcsdpc
