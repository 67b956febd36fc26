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

#include <chrono>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fcsdpc/condense.hpp"
#include "fcsdpc/decoder.hpp"

namespace fcsdpc {

/// Last Np applied inputs and measured outputs, oldest first. xi() stacks
/// them as (u_hist, y_hist), the row order of Wp.
class XiBuffer {
 public:
  XiBuffer(int Np, Eigen::Index m, Eigen::Index p);

  void push(const Vector& u, const Vector& y);
  bool full() const { return static_cast<int>(u_hist_.size()) == Np_; }
  Vector xi() const;
  const Vector& u_prev() const { return u_hist_.back(); }

  const std::deque<Vector>& u_hist() const { return u_hist_; }
  const std::deque<Vector>& y_hist() const { return y_hist_; }
  int Np() const { return Np_; }

 private:
  int Np_;
  Eigen::Index m_, p_;
  std::deque<Vector> u_hist_, y_hist_;
};

/// Output reference indexed by absolute time.
struct ReferenceSignal {
  enum class Kind { Constant, Sine, Step };
  Kind kind = Kind::Constant;
  Vector value;      ///< Constant level, Sine offset, Step level before `at`
  Vector amplitude;  ///< Sine only
  double period = 1.0;
  Vector after;      ///< Step only
  long at = 0;

  static ReferenceSignal constant(Vector level);
  static ReferenceSignal sine(Vector amplitude, double period, Vector offset);
  static ReferenceSignal step(Vector before, Vector after, long at);

  Vector operator()(long k) const;
  /// y_ref(k+1), ..., y_ref(k+Nf) stacked.
  Vector window(long k, int Nf) const;

  bool operator==(const ReferenceSignal& o) const {
    return kind == o.kind && detail::same(value, o.value) && detail::same(amplitude, o.amplitude) &&
           period == o.period && detail::same(after, o.after) && at == o.at;
  }
};

struct StepLog {
  long k = 0;
  Vector xi;
  Vector u_applied;
  Vector y_measured;
  Vector x;  ///< plant state at time k, for analysis only
  double cost = 0.0;
  SolveResult solve;
  std::chrono::nanoseconds step_time{0};  ///< gradient assembly + solve
};

/// Receding-horizon controller around a cached Hessian factor. Only the
/// gradient (and the reference offset g, when the window moves) is rebuilt
/// per step.
class DpcController {
 public:
  DpcController(ImplicitPredictor pred, SpcPredictor spc, RegWeights weights, WeightConfig wc,
                ControlSet cs, int Np, int Nf);

  struct Output {
    Vector u_apply;
    SolveResult solve;
    Vector u_sequence;
    std::chrono::nanoseconds step_time{0};
  };

  Output step(const XiBuffer& buffer, const ReferenceSignal& ref, long k, Method method,
              SolveTrace* trace = nullptr);

  const Matrix& hessian() const { return condenser_.hessian(); }
  const Matrix& factor() const { return condenser_.factor(); }
  int factorizations() const { return factorizations_; }
  const ImplicitPredictor& predictor() const { return pred_; }
  int Nf() const { return Nf_; }
  int Np() const { return Np_; }

 private:
  ImplicitPredictor pred_;
  SpcPredictor spc_;
  RegWeights weights_;
  WeightConfig wc_;
  ControlSet cs_;
  int Np_, Nf_;
  DpcCondenser condenser_;
  int factorizations_ = 1;
  std::optional<Vector> ref_window_;
  Vector g_;
};

struct Warmup {
  XiBuffer buffer;
  Vector x;  ///< plant state after the warmup inputs
};

/// Np random feasible steps from the zero state. `noise_sigma`, when
/// non-empty, is the per-channel measurement noise standard deviation.
Warmup warmup(const PlantModel& plant, const ControlSet& cs, int Np, std::uint64_t seed,
              const Vector& noise_sigma = Vector());

struct Scenario {
  PlantModel plant;
  ControlSet cs;
  int Np = 4;
  int Nf = 2;
  int collect_Nf = 0;  ///< data is collected for max(Nf, collect_Nf) so a sweep shares one record
  WeightConfig weights{};
  std::size_t collect_steps = 0;
  double snr_db = 40.0;
  std::uint64_t data_seed = 1;
  std::size_t loop_steps = 800;
  std::vector<Method> methods{Method::SDA, Method::ENUM};
  ReferenceSignal reference{};
  std::uint64_t loop_seed = 2;
  std::optional<double> loop_snr_db{};  ///< closed-loop measurement noise; off when empty
};

/// Seed of the measurement noise added to the data record collected with `data_seed`.
inline std::uint64_t data_noise_seed(std::uint64_t data_seed) {
  return data_seed ^ 0x9e3779b97f4a7c15ull;
}

/// Data collection and predictor fit shared by all methods of a scenario.
struct PreparedScenario {
  Trajectory clean;
  Trajectory data;
  DataMatrix D;
  RankReport rank;
  SpcPredictor spc;
  RegWeights weights;
  ImplicitPredictor pred;
  Vector output_power;  ///< per-channel mean square of the clean collection outputs
};

PreparedScenario prepare(const Scenario& s);

struct ClosedLoopRun {
  Method method = Method::SDA;
  int Nf = 0;
  std::vector<StepLog> logs;
  std::uint64_t hessian_checksum = 0;
  std::uint64_t factor_checksum = 0;
  int factorizations = 0;
};

/// One independent run per method: warmup, then loop_steps iterations of
/// measure, solve, apply, shift.
/// When `sda_trace` is set, every SDA solve appends its node log as JSON lines.
std::vector<ClosedLoopRun> run_closed_loop(const Scenario& s, const PreparedScenario& prep,
                                           std::ostream* sda_trace = nullptr);

struct TimingSummary {
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
  std::vector<double> outliers;  ///< samples above q75 + 1.5 IQR
  std::size_t count = 0;
};

/// Quartiles by linear interpolation between order statistics.
TimingSummary summarize(std::vector<double> samples);

/// Step times in nanoseconds, grouped by method.
std::map<Method, TimingSummary> timing_summary(std::span<const StepLog> logs);

/// CSV `k,method,u_1..u_m,y_1..y_p,cost,nodes,solve_time_ns`.
void write_step_csv_header(std::ostream& os, Eigen::Index m, Eigen::Index p);
void write_step_csv_rows(std::ostream& os, std::span<const StepLog> logs);

}  // namespace fcsdpc
