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

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fcsdpc/types.hpp"

namespace fcsdpc {

/// Discrete-time LTI plant without feed-through:
///   x(k+1) = A x(k) + B u(k),  y(k) = C x(k).
class PlantModel {
 public:
  PlantModel(Matrix A, Matrix B, Matrix C);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }

  Eigen::Index n() const { return A_.rows(); }
  Eigen::Index m() const { return B_.cols(); }
  Eigen::Index p() const { return C_.rows(); }

  bool operator==(const PlantModel& o) const {
    return detail::same(A_, o.A_) && detail::same(B_, o.B_) && detail::same(C_, o.C_);
  }

 private:
  Matrix A_, B_, C_;
};

/// Finite input alphabet, per channel, with an optional bound on the
/// infinity norm of the per-step input change.
class ControlSet {
 public:
  /// Membership tolerance when mapping a real value back onto a level.
  static constexpr double kMembershipTol = 1e-12;

  /// One list shared by all `channels` inputs.
  ControlSet(std::vector<double> levels, Eigen::Index channels,
             std::optional<double> delta_bound = std::nullopt);
  /// Separate list per channel.
  explicit ControlSet(std::vector<std::vector<double>> per_channel,
                      std::optional<double> delta_bound = std::nullopt);

  Eigen::Index channels() const {
    return static_cast<Eigen::Index>(levels_.size());
  }
  const std::vector<double>& levels(Eigen::Index channel) const {
    return levels_.at(static_cast<std::size_t>(channel));
  }
  int level_count(Eigen::Index channel) const {
    return static_cast<int>(levels(channel).size());
  }
  double level(Eigen::Index channel, int index) const {
    return levels(channel)[static_cast<std::size_t>(index)];
  }
  const std::optional<double>& delta_bound() const { return delta_bound_; }

  /// Integer label of `value` on `channel`, or nullopt if it is not a level.
  std::optional<int> index_of(Eigen::Index channel, double value) const;

  /// True when moving from `from` to `to` respects the switching bound.
  bool step_allowed(double from, double to) const {
    return !delta_bound_ ||
           std::abs(to - from) <= *delta_bound_ + kMembershipTol;
  }

  bool operator==(const ControlSet&) const = default;

 private:
  std::vector<std::vector<double>> levels_;
  std::optional<double> delta_bound_;
};

/// Logged input/output (and optionally state) sequence.
/// Invariant: y.size() == u.size(); x, when present, has one more entry.
struct Trajectory {
  std::vector<Vector> u;
  std::vector<Vector> y;
  std::vector<Vector> x;

  std::size_t size() const { return u.size(); }
  bool empty() const { return u.empty(); }
};

struct StepOutput {
  Vector x_next;
  Vector y;
};

/// One plant update. The returned output belongs to the pre-update state.
StepOutput step(const PlantModel& model, const Vector& x, const Vector& u);

Trajectory simulate(const PlantModel& model, const Vector& x0,
                    std::span<const Vector> u_seq);

/// Stacked predictor y(1..N_f) = O x(0) + T u(0..N_f-1).
struct MultiStep {
  Matrix O;
  Matrix T;
};

MultiStep multistep(const PlantModel& model, int horizon);

/// Alphabet membership of every component and the switching bound between
/// consecutive inputs, starting from `u_prev`.
bool is_feasible(std::span<const Vector> u_seq, const ControlSet& cs,
                 const Vector& u_prev);

/// Same check on a stacked sequence (step-major, m entries per step).
bool is_feasible(const Vector& u_stacked, const ControlSet& cs,
                 const Vector& u_prev);

}  // namespace fcsdpc
