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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fcsdpc/config.hpp"

namespace fcsdpc::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Applied to every implicit predictor before it is compared with the inner
/// minimizer; lets tests plant a defect and watch the check fail.
using PredictorTamper = std::function<void(ImplicitPredictor&)>;

CheckResult decoder_matches_enumeration(std::uint64_t seed, int instances = 600);
CheckResult implicit_predictor_matches_inner_minimum(std::uint64_t seed, int datasets = 50,
                                                     const PredictorTamper& tamper = {});
CheckResult regularizer_closed_form(std::uint64_t seed, int triples = 100);
CheckResult reduced_problem_same_argmin(std::uint64_t seed, int instances = 50);
CheckResult spc_exact_on_noise_free_data(std::uint64_t seed, int draws = 100);
CheckResult condensation_offset_constant(std::uint64_t seed, int params = 20, int samples = 20);
CheckResult factor_reconstructs_hessian(std::uint64_t seed, int matrices = 100);
/// Runs s with SDA and ENUM at N_f = 2.
CheckResult closed_loop_methods_agree(const Scenario& s);
CheckResult noise_hits_target_snr(const ExperimentConfig& cfg, std::size_t samples = 100'000);
/// Runs s with a sine reference and checks the Hessian and factor never change.
CheckResult hessian_cached(const Scenario& s);

struct SuiteOptions {
  std::uint64_t seed = 7;
  PredictorTamper tamper;
};

std::vector<CheckResult> run_suite(const ExperimentConfig& cfg, const SuiteOptions& opt = {});

void print_table(std::ostream& os, std::span<const CheckResult> results);

}  // namespace fcsdpc::verify
