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
#include <limits>
#include <span>

#include "fcsdpc/plant.hpp"

namespace fcsdpc {

/// Hankel partition of recorded data. Column t holds the window starting at
/// offset t:
///   Up = u(t..t+Np-1), Yp = y(t..t+Np-1),
///   Uf = u(t+Np..t+Np+Nf-1), Yf = y(t+Np+1..t+Np+Nf).
/// `window` keeps the full extended window u(t..t+L-1), y(t..t+L-1) with
/// L = Np+Nf+1, which is the matrix the behavioral rank condition refers to.
struct DataMatrix {
  Matrix Up, Uf, Yp, Yf;
  Matrix window;
  int Np = 0, Nf = 0;
  Eigen::Index m = 0, p = 0;

  Eigen::Index columns() const { return Up.cols(); }
  /// [Up; Yp]
  Matrix Wp() const;
  /// [Wp; Uf]
  Matrix past_and_future_inputs() const;
  /// [Up; Uf; Yp; Yf]
  Matrix stacked() const;
  /// [Wp; Uf; Yf], the row order of the prediction equality constraint.
  Matrix constraint_matrix() const;
};

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  bool disabled() const { return snr_db == std::numeric_limits<double>::infinity(); }
};

/// Random feasible excitation: each component uniform over its alphabet,
/// redrawn until the switching bound w.r.t. the previous input holds.
/// The first input is unconstrained. Noise free; deterministic in `seed`.
Trajectory collect_excitation(const PlantModel& model, const ControlSet& cs,
                              std::size_t steps, std::uint64_t seed,
                              const Vector& x0);

/// White Gaussian measurement noise per output channel, with variance
/// mean(y_c^2) / 10^(snr_db/10) measured over the whole trajectory.
Trajectory add_output_noise(const Trajectory& traj, const NoiseSpec& spec);

DataMatrix build_hankel(const Trajectory& traj, int Np, int Nf);

struct RankReport {
  Eigen::Index numerical_rank = 0;  ///< rank of the extended window matrix
  Eigen::Index target = 0;          ///< L*m + n
  bool satisfied = false;           ///< numerical_rank == target
  Eigen::Index stacked_rank = 0;    ///< rank of [Up; Uf; Yp; Yf]
  Eigen::Index stacked_rows = 0;
  bool full_row_rank = false;       ///< stacked_rank == stacked_rows
};

inline constexpr double kDefaultRankTol = 1e-9;

RankReport check_rank(const DataMatrix& D, Eigen::Index n,
                      double tol = kDefaultRankTol);

/// Full row rank of the input block-Hankel matrix with `order` block rows.
bool check_persistency(std::span<const Vector> u_data, int order,
                       double tol = kDefaultRankTol);

struct CollectionPlan {
  int Np = 1, Nf = 1;
  std::size_t min_steps = 0;
  std::size_t max_steps = 1'000'000;
};

/// Grows the excitation run (same seed, so earlier samples are kept) until
/// the input is persistently exciting of order Np+Nf+1+n and the Hankel
/// matrix is at least square. Throws DataQualityError when `max_steps` is
/// reached first.
Trajectory collect_persistent(const PlantModel& model, const ControlSet& cs,
                              const CollectionPlan& plan, std::uint64_t seed,
                              const Vector& x0);

/// CSV with header `k,u_1..u_m,y_1..y_p`, full double precision.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

}  // namespace fcsdpc
