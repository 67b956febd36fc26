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

#include "fcsdpc/random.hpp"

#include <cmath>

namespace fcsdpc::random {

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = g(rng);
  return M;
}

Vector gaussian(Rng& rng, Eigen::Index size) { return gaussian(rng, size, 1).col(0); }

Matrix orthogonal(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i)
    if (R(i, i) < 0) Q.col(i) = -Q.col(i);
  return Q;
}

PlantModel stable_plant(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p,
                        double spectral_radius) {
  std::uniform_real_distribution<double> radius(0.3 * spectral_radius, spectral_radius);
  std::uniform_real_distribution<double> angle(0.05, M_PI - 0.05);
  Matrix S = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  bool first = true;
  for (; i + 1 < n; i += 2) {
    const double r = first ? spectral_radius : radius(rng);
    first = false;
    const double th = angle(rng);
    S(i, i) = r * std::cos(th);
    S(i, i + 1) = -r * std::sin(th);
    S(i + 1, i) = r * std::sin(th);
    S(i + 1, i + 1) = r * std::cos(th);
  }
  if (i < n) S(i, i) = first ? spectral_radius : radius(rng);
  const Matrix Q = orthogonal(rng, n);
  return PlantModel(Q * S * Q.transpose(), gaussian(rng, n, m), gaussian(rng, p, n));
}

Matrix spd(Rng& rng, Eigen::Index n, double cond) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector eig(n);
  for (Eigen::Index i = 0; i < n; ++i) eig[i] = std::pow(cond, u(rng));
  const Matrix Q = orthogonal(rng, n);
  Matrix H = Q * eig.asDiagonal() * Q.transpose();
  return 0.5 * (H + H.transpose());
}

Vector alphabet_sequence(Rng& rng, const ControlSet& cs, int steps) {
  const Eigen::Index m = cs.channels();
  Vector u(m * steps);
  for (int k = 0; k < steps; ++k)
    for (Eigen::Index c = 0; c < m; ++c) {
      std::uniform_int_distribution<int> pick(0, cs.level_count(c) - 1);
      u[m * k + c] = cs.level(c, pick(rng));
    }
  return u;
}

Vector feasible_sequence(Rng& rng, const ControlSet& cs, const Vector& u_prev, int steps) {
  const Eigen::Index m = cs.channels();
  Vector u(m * steps);
  for (int k = 0; k < steps; ++k)
    for (Eigen::Index c = 0; c < m; ++c) {
      const double prev = k == 0 ? u_prev[c] : u[m * (k - 1) + c];
      std::vector<double> allowed;
      for (double v : cs.levels(c))
        if (cs.step_allowed(prev, v)) allowed.push_back(v);
      if (allowed.empty()) throw InfeasibleError("feasible_sequence: no reachable level");
      std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
      u[m * k + c] = allowed[pick(rng)];
    }
  return u;
}

}  // namespace fcsdpc::random
