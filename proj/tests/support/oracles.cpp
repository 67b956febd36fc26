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

#include "oracles.hpp"

#include <cmath>
#include <limits>

#include "fcsdpc/random.hpp"

namespace oracle {

Vector simulated_outputs(const PlantModel& plant, const Vector& x0, const Vector& u_f, int Nf) {
  const Eigen::Index m = plant.m(), p = plant.p();
  Vector y(p * Nf);
  Vector x = x0;
  for (int i = 0; i < Nf; ++i) {
    x = (plant.A() * x + plant.B() * u_f.segment(m * i, m)).eval();
    y.segment(p * i, p) = plant.C() * x;
  }
  return y;
}

Column hankel_column(const Trajectory& traj, int Np, int Nf, int t) {
  const Eigen::Index m = traj.u[0].size(), p = traj.y[0].size();
  Column c{Vector(m * Np), Vector(p * Np), Vector(m * Nf), Vector(p * Nf)};
  for (int i = 0; i < Np; ++i) {
    c.up.segment(m * i, m) = traj.u[static_cast<std::size_t>(t + i)];
    c.yp.segment(p * i, p) = traj.y[static_cast<std::size_t>(t + i)];
  }
  for (int i = 0; i < Nf; ++i) {
    c.uf.segment(m * i, m) = traj.u[static_cast<std::size_t>(t + Np + i)];
    c.yf.segment(p * i, p) = traj.y[static_cast<std::size_t>(t + Np + 1 + i)];
  }
  return c;
}

Matrix projection(const Matrix& M) {
  const Matrix gram = M * M.transpose();
  return M.transpose() * gram.ldlt().solve(M);
}

double h_min(const DataMatrix& D, RegularizerKind kind, double lambda, const Vector& xi,
             const Vector& u_f, const Vector& y_f) {
  Matrix A(D.Up.rows() + D.Yp.rows() + D.Uf.rows() + D.Yf.rows(), D.columns());
  A << D.Up, D.Yp, D.Uf, D.Yf;
  Vector b(A.rows());
  b << xi, u_f, y_f;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  const Vector a0 = cod.solve(b);
  if ((A * a0 - b).norm() > 1e-6 * (1.0 + b.norm())) throw std::runtime_error("h_min: inconsistent");
  if (kind == RegularizerKind::TwoNorm) return lambda * a0.squaredNorm();

  Matrix M(D.Up.rows() + D.Yp.rows() + D.Uf.rows(), D.columns());
  M << D.Up, D.Yp, D.Uf;
  const Matrix P = Matrix::Identity(D.columns(), D.columns()) - projection(M);
  Eigen::FullPivLU<Matrix> lu(A);
  const Matrix N = lu.kernel();
  if (N.cols() == 0 || N.isZero(0.0)) return lambda * (P * a0).squaredNorm();
  const Matrix PN = P * N;
  const Vector z = PN.completeOrthogonalDecomposition().solve(-(P * a0));
  return lambda * (P * (a0 + N * z)).squaredNorm();
}

Vector best_output(const DataMatrix& D, RegularizerKind kind, double lambda, const Matrix& Q_bar,
                   const Vector& y_ref, const Vector& xi, const Vector& u_f) {
  const Eigen::Index q = Q_bar.rows();
  auto total = [&](const Vector& y) {
    return (y - y_ref).dot(Q_bar * (y - y_ref)) + h_min(D, kind, lambda, xi, u_f, y);
  };
  // exact quadratic: total(y) = c + b^T y + y^T G y
  const Vector zero = Vector::Zero(q);
  const double c = total(zero);
  Matrix G(q, q);
  Vector b(q);
  std::vector<double> diag(static_cast<std::size_t>(q));
  for (Eigen::Index i = 0; i < q; ++i) {
    const Vector e = Vector::Unit(q, i);
    const double plus = total(e), minus = total(-e);
    G(i, i) = 0.5 * (plus + minus) - c;
    b[i] = 0.5 * (plus - minus);
  }
  for (Eigen::Index i = 0; i < q; ++i)
    for (Eigen::Index j = i + 1; j < q; ++j) {
      const double v = total(Vector::Unit(q, i) + Vector::Unit(q, j));
      G(i, j) = G(j, i) = 0.5 * (v - c - b[i] - b[j] - G(i, i) - G(j, j));
    }
  return G.ldlt().solve(-0.5 * b);
}

namespace {

bool feasible(const Vector& u, const ControlSet& cs, const Vector& u_prev) {
  const Eigen::Index m = cs.channels();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Eigen::Index c = i % m;
    const auto& lv = cs.levels(c);
    if (std::find(lv.begin(), lv.end(), u[i]) == lv.end()) return false;
    const double before = i < m ? u_prev[c] : u[i - m];
    if (cs.delta_bound() && std::abs(u[i] - before) > *cs.delta_bound() + 1e-12) return false;
  }
  return true;
}

}  // namespace

std::optional<Brute> brute_force_ils(const Matrix& L, const Vector& target, const ControlSet& cs,
                                     const Vector& u_prev, int Nf) {
  const Eigen::Index m = cs.channels(), N = m * Nf;
  std::optional<Brute> best;
  std::vector<int> idx(static_cast<std::size_t>(N), 0);
  Vector u(N);
  while (true) {
    for (Eigen::Index i = 0; i < N; ++i) u[i] = cs.level(i % m, idx[static_cast<std::size_t>(i)]);
    if (feasible(u, cs, u_prev)) {
      const double cost = (L * u - target).squaredNorm();
      if (!best) best = Brute{u, cost, 0};
      // lexicographic order of the scan keeps the first of equal costs
      else if (cost < best->cost) {
        best->u = u;
        best->cost = cost;
      }
      ++best->feasible;
    }
    Eigen::Index pos = N - 1;
    while (pos >= 0) {
      auto& k = idx[static_cast<std::size_t>(pos)];
      if (++k < cs.level_count(pos % m)) break;
      k = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

double mpc_cost(const PlantModel& plant, const Matrix& Q, const Matrix& R, const Vector& x0,
                const Vector& u_prev, const Vector& y_ref, const Vector& u_f, int Nf) {
  const Eigen::Index m = plant.m(), p = plant.p();
  const Vector y = simulated_outputs(plant, x0, u_f, Nf);
  double cost = 0.0;
  for (int i = 0; i < Nf; ++i) {
    const Vector e = y.segment(p * i, p) - y_ref.segment(p * i, p);
    const Vector du = u_f.segment(m * i, m) - (i == 0 ? u_prev : Vector(u_f.segment(m * (i - 1), m)));
    cost += e.dot(Q * e) + du.dot(R * du);
  }
  return cost;
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = g(rng);
  return M;
}

Vector random_vector(Rng& rng, Eigen::Index n) { return random_matrix(rng, n, 1).col(0); }

Matrix random_spd(Rng& rng, Eigen::Index n, double cond) {
  const Matrix Q = random_matrix(rng, n, n).householderQr().householderQ();
  Vector ev(n);
  for (Eigen::Index i = 0; i < n; ++i)
    ev[i] = n == 1 ? 1.0 : std::pow(cond, -static_cast<double>(i) / static_cast<double>(n - 1));
  Matrix S = Q * ev.asDiagonal() * Q.transpose();
  return 0.5 * (S + S.transpose());
}

NoisyData noisy_data(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p, int Np, int Nf,
                     double snr_db) {
  for (;;) {
    PlantModel plant = fcsdpc::random::stable_plant(rng, n, m, p, 0.9);
    ControlSet cs({-1.0, 0.0, 1.0}, m);
    const auto rows = static_cast<std::size_t>((m + p) * (Np + Nf));
    Trajectory clean = fcsdpc::collect_excitation(plant, cs, 3 * rows + 30, rng(), Vector::Zero(n));
    Trajectory data = fcsdpc::add_output_noise(clean, fcsdpc::NoiseSpec{snr_db, rng()});
    DataMatrix D = fcsdpc::build_hankel(data, Np, Nf);
    if (rank(D.stacked()) == D.stacked().rows()) return {std::move(plant), std::move(D)};
  }
}

Eigen::Index rank(const Matrix& M, double tol) {
  if (M.size() == 0) return 0;
  const Vector s = Eigen::JacobiSVD<Matrix>(M).singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  return (s.array() > tol * s[0]).count();
}

}  // namespace oracle
