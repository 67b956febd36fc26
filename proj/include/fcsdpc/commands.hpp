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
#include <iosfwd>
#include <optional>
#include <string>

#include "fcsdpc/config.hpp"
#include "fcsdpc/verify.hpp"

namespace fcsdpc::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kDataError = 2, kPropertyFailure = 3 };

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::string> out;
  std::optional<Method> method;
  std::optional<int> Nf;
  std::optional<std::uint64_t> seed;  ///< data seed; the loop seed becomes seed + 1
  bool trace = false;
};

/// Applies the overrides and re-validates.
void apply(ExperimentConfig& cfg, const Overrides& o);

/// Writes trajectory.csv and rank_report.json into the output directory.
int cmd_collect(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

/// Per N_f: steps_nf<N>.csv, predictor_nf<N>.json and (with tracing)
/// trace_nf<N>.jsonl; timing.json across the whole sweep.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err,
               const verify::SuiteOptions& opt = {});

}  // namespace fcsdpc::cli
