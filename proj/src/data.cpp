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

#include "fcsdpc/data.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "fcsdpc/linalg.hpp"

namespace fcsdpc {

Matrix DataMatrix::Wp() const {
  Matrix W(Up.rows() + Yp.rows(), columns());
  W << Up, Yp;
  return W;
}

Matrix DataMatrix::past_and_future_inputs() const {
  Matrix M(Up.rows() + Yp.rows() + Uf.rows(), columns());
  M << Up, Yp, Uf;
  return M;
}

Matrix DataMatrix::stacked() const {
  Matrix D(Up.rows() + Uf.rows() + Yp.rows() + Yf.rows(), columns());
  D << Up, Uf, Yp, Yf;
  return D;
}

Matrix DataMatrix::constraint_matrix() const {
  Matrix D(Up.rows() + Yp.rows() + Uf.rows() + Yf.rows(), columns());
  D << Up, Yp, Uf, Yf;
  return D;
}

Trajectory collect_excitation(const PlantModel& model, const ControlSet& cs,
                              std::size_t steps, std::uint64_t seed,
                              const Vector& x0) {
  detail::require_dims(cs.channels() == model.m(),
                       "collect_excitation: control set / plant input mismatch");
  if (steps == 0) throw DimensionError("collect_excitation: steps must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Vector> inputs;
  inputs.reserve(steps);
  const auto m = model.m();
  for (std::size_t k = 0; k < steps; ++k) {
    Vector u(m);
    for (Eigen::Index c = 0; c < m; ++c) {
      std::uniform_int_distribution<int> pick(0, cs.level_count(c) - 1);
      double value = cs.level(c, pick(rng));
      if (k > 0) {
        const double prev = inputs.back()[c];
        // staying put is always allowed, so this terminates
        while (!cs.step_allowed(prev, value)) value = cs.level(c, pick(rng));
      }
      u[c] = value;
    }
    inputs.push_back(std::move(u));
  }
  return simulate(model, x0, inputs);
}

Trajectory add_output_noise(const Trajectory& traj, const NoiseSpec& spec) {
  if (traj.empty()) throw DataQualityError("add_output_noise: empty trajectory");
  if (std::isnan(spec.snr_db) || spec.snr_db == -std::numeric_limits<double>::infinity())
    throw ConfigError("add_output_noise: snr_db must be finite or +inf");
  if (spec.disabled()) return traj;

  const auto p = traj.y.front().size();
  const double ratio = std::pow(10.0, spec.snr_db / 10.0);
  Vector sigma(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    double power = 0.0;
    for (const Vector& y : traj.y) power += y[c] * y[c];
    power /= static_cast<double>(traj.y.size());
    if (!(power > 0.0))
      throw DataQualityError("add_output_noise: output channel " +
                             std::to_string(c + 1) +
                             " has zero power, SNR is undefined");
    sigma[c] = std::sqrt(power / ratio);
  }

  Trajectory noisy = traj;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Vector& y : noisy.y)
    for (Eigen::Index c = 0; c < p; ++c) y[c] += sigma[c] * gauss(rng);
  return noisy;
}

DataMatrix build_hankel(const Trajectory& traj, int Np, int Nf) {
  if (Np < 1 || Nf < 1) throw DimensionError("build_hankel: horizons must be >= 1");
  const std::size_t window = static_cast<std::size_t>(Np + Nf + 1);
  if (traj.size() < window)
    throw DataQualityError("build_hankel: trajectory has " +
                           std::to_string(traj.size()) +
                           " samples, at least " + std::to_string(window) +
                           " required for Np=" + std::to_string(Np) +
                           ", Nf=" + std::to_string(Nf));
  const auto m = traj.u.front().size();
  const auto p = traj.y.front().size();
  const auto cols = static_cast<Eigen::Index>(traj.size() - window + 1);
  const auto L = static_cast<Eigen::Index>(window);

  DataMatrix D;
  D.Np = Np;
  D.Nf = Nf;
  D.m = m;
  D.p = p;
  D.Up.resize(m * Np, cols);
  D.Yp.resize(p * Np, cols);
  D.Uf.resize(m * Nf, cols);
  D.Yf.resize(p * Nf, cols);
  D.window.resize(L * (m + p), cols);

  for (Eigen::Index t = 0; t < cols; ++t) {
    const auto at = [t](int offset) { return static_cast<std::size_t>(t + offset); };
    for (int i = 0; i < Np; ++i) {
      D.Up.col(t).segment(m * i, m) = traj.u[at(i)];
      D.Yp.col(t).segment(p * i, p) = traj.y[at(i)];
    }
    for (int i = 0; i < Nf; ++i) {
      D.Uf.col(t).segment(m * i, m) = traj.u[at(Np + i)];
      D.Yf.col(t).segment(p * i, p) = traj.y[at(Np + 1 + i)];
    }
    for (Eigen::Index i = 0; i < L; ++i) {
      D.window.col(t).segment(m * i, m) = traj.u[at(static_cast<int>(i))];
      D.window.col(t).segment(m * L + p * i, p) = traj.y[at(static_cast<int>(i))];
    }
  }
  return D;
}

RankReport check_rank(const DataMatrix& D, Eigen::Index n, double tol) {
  if (!(tol > 0.0)) throw DimensionError("check_rank: tol must be positive");
  RankReport r;
  const Eigen::Index L = D.Np + D.Nf + 1;
  r.target = L * D.m + n;
  r.numerical_rank = linalg::numerical_rank(D.window, tol);
  r.satisfied = r.numerical_rank == r.target;
  const Matrix stacked = D.stacked();
  r.stacked_rows = stacked.rows();
  r.stacked_rank = linalg::numerical_rank(stacked, tol);
  r.full_row_rank = r.stacked_rank == r.stacked_rows;
  return r;
}

bool check_persistency(std::span<const Vector> u_data, int order, double tol) {
  if (order < 1) throw DimensionError("check_persistency: order must be >= 1");
  if (u_data.size() < static_cast<std::size_t>(order)) return false;
  const auto m = u_data.front().size();
  const auto cols = static_cast<Eigen::Index>(u_data.size()) - order + 1;
  if (cols < m * order) return false;
  Matrix H(m * order, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (int i = 0; i < order; ++i)
      H.col(j).segment(m * i, m) = u_data[static_cast<std::size_t>(j + i)];
  return linalg::numerical_rank(H, tol) == m * order;
}

Trajectory collect_persistent(const PlantModel& model, const ControlSet& cs,
                              const CollectionPlan& plan, std::uint64_t seed,
                              const Vector& x0) {
  const int order = plan.Np + plan.Nf + 1 + static_cast<int>(model.n());
  const auto rows = static_cast<std::size_t>((model.m() + model.p()) * (plan.Np + plan.Nf));
  // ell = steps - (Np + Nf) must reach the row count of the stacked matrix
  const std::size_t square = rows + static_cast<std::size_t>(plan.Np + plan.Nf);
  const std::size_t exciting = static_cast<std::size_t>(order - 1) +
                               static_cast<std::size_t>(model.m() * order);
  std::size_t steps = std::max({plan.min_steps, square, exciting,
                                static_cast<std::size_t>(plan.Np + plan.Nf + 1)});
  while (true) {
    Trajectory traj = collect_excitation(model, cs, steps, seed, x0);
    if (check_persistency(traj.u, order)) return traj;
    if (steps >= plan.max_steps)
      throw DataQualityError(
          "collect_persistent: input not persistently exciting of order " +
          std::to_string(order) + " after " + std::to_string(steps) + " steps");
    steps = std::min(plan.max_steps, steps * 2);
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto m = traj.empty() ? 0 : traj.u.front().size();
  const auto p = traj.empty() ? 0 : traj.y.front().size();
  os << "k";
  for (Eigen::Index c = 1; c <= m; ++c) os << ",u_" << c;
  for (Eigen::Index c = 1; c <= p; ++c) os << ",y_" << c;
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << k;
    for (Eigen::Index c = 0; c < m; ++c) os << ',' << traj.u[k][c];
    for (Eigen::Index c = 0; c < p; ++c) os << ',' << traj.y[k][c];
    os << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataQualityError("trajectory CSV: missing header");
  Eigen::Index m = 0, p = 0;
  {
    std::istringstream hs(line);
    std::string field;
    std::getline(hs, field, ',');
    if (field != "k") throw DataQualityError("trajectory CSV: header must start with k");
    while (std::getline(hs, field, ',')) {
      if (field.rfind("u_", 0) == 0) {
        if (p > 0) throw DataQualityError("trajectory CSV: u columns after y columns");
        ++m;
      } else if (field.rfind("y_", 0) == 0) {
        ++p;
      } else {
        throw DataQualityError("trajectory CSV: unexpected column '" + field + "'");
      }
    }
  }
  Trajectory traj;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(rs, field, ',')) values.push_back(std::stod(field));
    if (values.size() != static_cast<std::size_t>(1 + m + p))
      throw DataQualityError("trajectory CSV: row " + std::to_string(row + 1) +
                             " has wrong column count");
    traj.u.emplace_back(Eigen::Map<const Vector>(values.data() + 1, m));
    traj.y.emplace_back(Eigen::Map<const Vector>(values.data() + 1 + m, p));
    ++row;
  }
  return traj;
}

}  // namespace fcsdpc
