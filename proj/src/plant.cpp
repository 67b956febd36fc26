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

#include "fcsdpc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fcsdpc {

PlantModel::PlantModel(Matrix A, Matrix B, Matrix C)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
  detail::require_dims(A_.rows() > 0 && A_.rows() == A_.cols(),
                       "PlantModel: A must be square and non-empty");
  detail::require_dims(B_.rows() == A_.rows() && B_.cols() > 0,
                       "PlantModel: B must be n x m with m >= 1");
  detail::require_dims(C_.cols() == A_.rows() && C_.rows() > 0,
                       "PlantModel: C must be p x n with p >= 1");
}

namespace {

void validate_levels(const std::vector<double>& levels) {
  if (levels.empty()) throw ConfigError("ControlSet: empty alphabet");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i]))
      throw ConfigError("ControlSet: non-finite level");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw ConfigError("ControlSet: levels must be strictly increasing");
  }
}

}  // namespace

ControlSet::ControlSet(std::vector<double> levels, Eigen::Index channels,
                       std::optional<double> delta_bound)
    : ControlSet(std::vector<std::vector<double>>(
                     static_cast<std::size_t>(std::max<Eigen::Index>(channels, 0)),
                     levels),
                 delta_bound) {}

ControlSet::ControlSet(std::vector<std::vector<double>> per_channel,
                       std::optional<double> delta_bound)
    : levels_(std::move(per_channel)), delta_bound_(delta_bound) {
  if (levels_.empty()) throw ConfigError("ControlSet: no input channels");
  for (const auto& l : levels_) validate_levels(l);
  if (delta_bound_ && !(*delta_bound_ >= 0.0 && std::isfinite(*delta_bound_)))
    throw ConfigError("ControlSet: delta_bound must be finite and >= 0");
}

std::optional<int> ControlSet::index_of(Eigen::Index channel,
                                        double value) const {
  const auto& l = levels(channel);
  auto it = std::lower_bound(l.begin(), l.end(), value - kMembershipTol);
  if (it != l.end() && std::abs(*it - value) <= kMembershipTol)
    return static_cast<int>(it - l.begin());
  return std::nullopt;
}

StepOutput step(const PlantModel& model, const Vector& x, const Vector& u) {
  detail::require_dims(x.size() == model.n(), "step: state dimension mismatch");
  detail::require_dims(u.size() == model.m(), "step: input dimension mismatch");
  return {model.A() * x + model.B() * u, model.C() * x};
}

Trajectory simulate(const PlantModel& model, const Vector& x0,
                    std::span<const Vector> u_seq) {
  detail::require_dims(x0.size() == model.n(),
                       "simulate: initial state dimension mismatch");
  Trajectory traj;
  traj.u.reserve(u_seq.size());
  traj.y.reserve(u_seq.size());
  traj.x.reserve(u_seq.size() + 1);
  traj.x.push_back(x0);
  for (const Vector& u : u_seq) {
    auto out = step(model, traj.x.back(), u);
    traj.u.push_back(u);
    traj.y.push_back(std::move(out.y));
    traj.x.push_back(std::move(out.x_next));
  }
  return traj;
}

MultiStep multistep(const PlantModel& model, int horizon) {
  if (horizon < 1) throw DimensionError("multistep: horizon must be >= 1");
  const auto n = model.n(), m = model.m(), p = model.p();
  MultiStep ms{Matrix::Zero(p * horizon, n), Matrix::Zero(p * horizon, m * horizon)};

  // markov[k] = C A^k B, powers[k] = C A^(k+1)
  std::vector<Matrix> markov;
  markov.reserve(static_cast<std::size_t>(horizon));
  Matrix CA = model.C();
  for (int k = 0; k < horizon; ++k) {
    markov.push_back(CA * model.B());
    CA = CA * model.A();
    ms.O.middleRows(p * k, p) = CA;
  }
  for (int i = 0; i < horizon; ++i)
    for (int j = 0; j <= i; ++j)
      ms.T.block(p * i, m * j, p, m) = markov[static_cast<std::size_t>(i - j)];
  return ms;
}

namespace {

bool feasible_step(const ControlSet& cs, const Vector& u, const Vector& prev) {
  for (Eigen::Index c = 0; c < u.size(); ++c) {
    if (!cs.index_of(c, u[c])) return false;
    if (!cs.step_allowed(prev[c], u[c])) return false;
  }
  return true;
}

}  // namespace

bool is_feasible(std::span<const Vector> u_seq, const ControlSet& cs,
                 const Vector& u_prev) {
  detail::require_dims(u_prev.size() == cs.channels(),
                       "is_feasible: u_prev dimension mismatch");
  const Vector* prev = &u_prev;
  for (const Vector& u : u_seq) {
    detail::require_dims(u.size() == cs.channels(),
                         "is_feasible: input dimension mismatch");
    if (!feasible_step(cs, u, *prev)) return false;
    prev = &u;
  }
  return true;
}

bool is_feasible(const Vector& u_stacked, const ControlSet& cs,
                 const Vector& u_prev) {
  const auto m = cs.channels();
  detail::require_dims(u_stacked.size() % m == 0,
                       "is_feasible: stacked length not a multiple of m");
  std::vector<Vector> seq;
  for (Eigen::Index k = 0; k < u_stacked.size() / m; ++k)
    seq.emplace_back(u_stacked.segment(k * m, m));
  return is_feasible(std::span<const Vector>(seq), cs, u_prev);
}

}  // namespace fcsdpc
