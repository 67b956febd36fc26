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

#include <gtest/gtest.h>

#include <algorithm>

#include "fcsdpc/condense.hpp"
#include "fcsdpc/random.hpp"
#include "oracles.hpp"

namespace {

using namespace fcsdpc;

double quad(const CondensedProblem& cp, const Vector& u) { return 0.5 * u.dot(cp.H * u) + cp.f.dot(u); }

double spread(const std::vector<double>& v, double scale) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / std::max(1.0, scale);
}

WeightConfig weights(const Matrix& Q, const Matrix& R, double lambda = 1e3,
                     RegularizerKind kind = RegularizerKind::Projection) {
  WeightConfig wc;
  wc.Q = Q;
  wc.R = R;
  wc.lambda_a = lambda;
  wc.kind = kind;
  return wc;
}

TEST(DiffOperators, SmallCase) {
  const DiffOperators d = diff_operators(1, 2);
  Matrix I(2, 2);
  I << 1, 0, -1, 1;
  EXPECT_EQ(d.I_op, I);
  EXPECT_EQ(d.L_op, (Matrix(2, 1) << 1, 0).finished());
}

TEST(DiffOperators, ConstantSequenceHasNoChange) {
  const DiffOperators d = diff_operators(3, 4);
  const Vector c = (Vector(3) << 0.5, -1.0, 2.0).finished();
  EXPECT_TRUE((d.I_op * c.replicate(4, 1) - d.L_op * c).isZero(0.0));
}

TEST(DiffOperators, MatchesDirectDifferencing) {
  oracle::Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 1 + trial % 3;
    const int Nf = 1 + trial % 5;
    const DiffOperators d = diff_operators(m, Nf);
    const Vector u = oracle::random_vector(rng, m * Nf), prev = oracle::random_vector(rng, m);
    Vector du(m * Nf);
    for (int k = 0; k < Nf; ++k)
      du.segment(m * k, m) = u.segment(m * k, m) - (k == 0 ? prev : Vector(u.segment(m * (k - 1), m)));
    EXPECT_LE((d.I_op * u - d.L_op * prev - du).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(WeightConfig, Validation) {
  EXPECT_NO_THROW(weights(Matrix::Identity(2, 2), Matrix::Identity(1, 1)).validate());
  EXPECT_THROW(weights(Matrix::Identity(2, 2), Matrix::Identity(1, 1), 0.0).validate(), ConfigError);
  EXPECT_THROW(weights(Matrix::Identity(2, 2), Matrix::Zero(1, 1)).validate(), ConfigError);
  EXPECT_THROW(weights(-Matrix::Identity(2, 2), Matrix::Identity(1, 1)).validate(), ConfigError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW(weights(asym, Matrix::Identity(1, 1)).validate(), ConfigError);
  EXPECT_NO_THROW(weights(Matrix::Zero(2, 2), Matrix::Identity(1, 1)).validate());
}

TEST(LowerFactor, IdentityAndScaledIdentity) {
  EXPECT_EQ(lower_factor(Matrix::Identity(3, 3)), Matrix::Identity(3, 3));
  EXPECT_EQ(lower_factor(4.0 * Matrix::Identity(2, 2)), 2.0 * Matrix::Identity(2, 2));
}

TEST(LowerFactor, ReconstructsRandomSpd) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 12;
    const Matrix H = oracle::random_spd(rng, n, 1e4);
    const Matrix L = lower_factor(H);
    EXPECT_LE((L.transpose() * L - H).cwiseAbs().maxCoeff(), 1e-10 * H.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
      EXPECT_GT(L(i, i), 0.0);
      for (Eigen::Index j = i + 1; j < n; ++j) EXPECT_EQ(L(i, j), 0.0);
    }
  }
}

TEST(LowerFactor, RejectsIndefinite) {
  Matrix H = Matrix::Identity(2, 2);
  H(1, 1) = -1.0;
  EXPECT_THROW(lower_factor(H), NumericalError);
}

TEST(Transform, ZeroGradient) {
  oracle::Rng rng(3);
  const Transformed t = transform(lower_factor(oracle::random_spd(rng, 4, 10.0)), Vector::Zero(4));
  EXPECT_TRUE(t.u_unc.isZero(0.0));
  EXPECT_TRUE(t.u_unc_t.isZero(0.0));
}

TEST(Transform, Scalar) {
  const Transformed t = transform(lower_factor(Matrix::Constant(1, 1, 4.0)), Vector::Constant(1, -4.0));
  EXPECT_DOUBLE_EQ(t.u_unc[0], 1.0);
  EXPECT_DOUBLE_EQ(t.u_unc_t[0], 2.0);
}

TEST(Transform, LatticeObjectivesAgreeUpToConstant) {
  oracle::Rng rng(4);
  const Eigen::Index n = 6;
  const Matrix H = oracle::random_spd(rng, n, 100.0);
  const Vector f = oracle::random_vector(rng, n);
  const Matrix L = lower_factor(H);
  const Transformed t = transform(L, f);
  EXPECT_LE((H * t.u_unc + f).norm(), 1e-10 * (1.0 + f.norm()));
  std::uniform_int_distribution<int> level(-1, 1);
  Vector best_q, best_l;
  double bq = 1e300, bl = 1e300;
  std::vector<double> offsets;
  for (int s = 0; s < 200; ++s) {
    Vector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = level(rng);
    const double q = 0.5 * u.dot(H * u) + f.dot(u);
    const double l = (L * u - t.u_unc_t).squaredNorm();
    offsets.push_back(0.5 * l - q);
    if (q < bq) bq = q, best_q = u;
    if (l < bl) bl = l, best_l = u;
  }
  EXPECT_EQ(best_q, best_l);
  EXPECT_LE(spread(offsets, 1.0), 1e-10);
}

TEST(CondenseMpc, ScalarIntegrator) {
  const PlantModel plant(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  const MultiStep ms = multistep(plant, 1);
  const CondensedProblem cp = condense_mpc(ms.O, ms.T, weights(Matrix::Ones(1, 1), Matrix::Ones(1, 1)),
                                           Vector::Zero(1), Vector::Zero(1), Vector::Zero(1));
  EXPECT_DOUBLE_EQ(cp.H(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(cp.f[0], 0.0);
  EXPECT_DOUBLE_EQ(cp.u_unc[0], 0.0);
}

TEST(CondenseMpc, ZeroOutputWeightHoldsPreviousInput) {
  oracle::Rng rng(5);
  const PlantModel plant = random::stable_plant(rng, 3, 2, 2);
  const int Nf = 4;
  const MultiStep ms = multistep(plant, Nf);
  const Vector u_prev = oracle::random_vector(rng, 2);
  const CondensedProblem cp =
      condense_mpc(ms.O, ms.T, weights(Matrix::Zero(2, 2), oracle::random_spd(rng, 2, 5.0)),
                   oracle::random_vector(rng, 3), u_prev, oracle::random_vector(rng, 2 * Nf));
  EXPECT_LE((cp.u_unc - u_prev.replicate(Nf, 1)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(CondenseMpc, QuadraticMatchesSimulatedCostUpToConstant) {
  oracle::Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 3, m = 1 + trial % 3, p = 1 + trial % 2;
    const int Nf = 1 + trial % 5;
    const PlantModel plant = random::stable_plant(rng, n, m, p);
    const MultiStep ms = multistep(plant, Nf);
    const Matrix Qh = oracle::random_matrix(rng, p, p);
    const WeightConfig wc = weights(Qh * Qh.transpose(), oracle::random_spd(rng, m, 10.0));
    const Vector x0 = oracle::random_vector(rng, n), u_prev = oracle::random_vector(rng, m);
    const Vector y_ref = oracle::random_vector(rng, p * Nf);
    const CondensedProblem cp = condense_mpc(ms.O, ms.T, wc, x0, u_prev, y_ref);
    std::vector<double> offsets;
    double scale = 0.0;
    for (int s = 0; s < 20; ++s) {
      const Vector u = oracle::random_vector(rng, m * Nf);
      const double direct = oracle::mpc_cost(plant, wc.Q, wc.R, x0, u_prev, y_ref, u, Nf);
      offsets.push_back(direct - quad(cp, u));
      scale = std::max(scale, std::abs(direct));
    }
    EXPECT_LE(spread(offsets, scale), 1e-8) << "trial " << trial;
    EXPECT_LE((cp.H - cp.H.transpose()).cwiseAbs().maxCoeff(), 1e-12 * cp.H.cwiseAbs().maxCoeff());
  }
}

struct DpcFixture {
  oracle::NoisyData data;
  SpcPredictor spc;
  RegWeights w;
};

DpcFixture dpc_fixture(oracle::Rng& rng, Eigen::Index m, Eigen::Index p, int Np, int Nf) {
  auto data = oracle::noisy_data(rng, 3, m, p, Np, Nf, 30.0);
  SpcPredictor spc = fit_spc(data.D);
  RegWeights w = reg_weights(data.D);
  return {std::move(data), std::move(spc), std::move(w)};
}

TEST(CondenseDpc, ZeroSourcesGiveZeroGradient) {
  oracle::Rng rng(7);
  const auto fx = dpc_fixture(rng, 2, 2, 3, 2);
  for (RegularizerKind kind : {RegularizerKind::Projection, RegularizerKind::TwoNorm}) {
    const WeightConfig wc = weights(Matrix::Identity(2, 2), 1e-3 * Matrix::Identity(2, 2), 1e3, kind);
    const ImplicitPredictor pred = implicit_predictor(fx.spc, fx.w, wc.Q_bar(2), wc.lambda_a, Vector::Zero(4));
    const CondensedProblem cp =
        condense_dpc(pred, fx.spc, fx.w, wc, Vector::Zero(12), Vector::Zero(2), Vector::Zero(4));
    EXPECT_TRUE(cp.f.isZero(0.0));
    EXPECT_TRUE(cp.u_unc.isZero(0.0));
  }
}

TEST(CondenseDpc, QuadraticMatchesRegularizedCostUpToConstant) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index m = 1 + trial % 2, p = 1 + (trial / 2) % 2;
    const int Np = 2 + trial % 3, Nf = 1 + trial % 3;
    const auto fx = dpc_fixture(rng, m, p, Np, Nf);
    for (RegularizerKind kind : {RegularizerKind::Projection, RegularizerKind::TwoNorm}) {
      const WeightConfig wc = weights(oracle::random_spd(rng, p, 10.0), 0.1 * oracle::random_spd(rng, m, 10.0),
                                      std::pow(10.0, trial % 4), kind);
      const Vector y_ref = oracle::random_vector(rng, p * Nf);
      const Vector xi = oracle::random_vector(rng, (m + p) * Np), u_prev = oracle::random_vector(rng, m);
      const ImplicitPredictor pred = implicit_predictor(fx.spc, fx.w, wc.Q_bar(Nf), wc.lambda_a, y_ref);
      const CondensedProblem cp = condense_dpc(pred, fx.spc, fx.w, wc, xi, u_prev, y_ref);
      const DiffOperators ops = diff_operators(m, Nf);
      std::vector<double> offsets;
      double scale = 0.0;
      for (int s = 0; s < 20; ++s) {
        const Vector u = oracle::random_vector(rng, m * Nf);
        const Vector y = pred.predict(xi, u);
        const Vector e = y - y_ref, du = ops.I_op * u - ops.L_op * u_prev;
        const double direct = e.dot(wc.Q_bar(Nf) * e) + du.dot(wc.R_bar(Nf) * du) +
                              oracle::h_min(fx.data.D, kind, wc.lambda_a, xi, u, y);
        offsets.push_back(direct - quad(cp, u));
        scale = std::max(scale, std::abs(direct));
      }
      EXPECT_LE(spread(offsets, scale), 1e-7) << "trial " << trial << " kind " << to_string(kind);
    }
  }
}

TEST(DpcCondenser, HessianIndependentOfStepData) {
  oracle::Rng rng(9);
  const auto fx = dpc_fixture(rng, 2, 1, 3, 3);
  const WeightConfig wc = weights(Matrix::Identity(1, 1), 1e-2 * Matrix::Identity(2, 2));
  const ImplicitPredictor a = implicit_predictor(fx.spc, fx.w, wc.Q_bar(3), wc.lambda_a, oracle::random_vector(rng, 3));
  const ImplicitPredictor b = implicit_predictor(fx.spc, fx.w, wc.Q_bar(3), wc.lambda_a, oracle::random_vector(rng, 3));
  const DpcCondenser ca(a, fx.spc, fx.w, wc), cb(b, fx.spc, fx.w, wc);
  EXPECT_EQ(ca.hessian(), cb.hessian());
  EXPECT_EQ(ca.factor(), cb.factor());
  const CondensedProblem p1 = ca.problem(oracle::random_vector(rng, 9), oracle::random_vector(rng, 2),
                                         oracle::random_vector(rng, 3), a.g);
  EXPECT_EQ(p1.H, ca.hessian());
  EXPECT_EQ(p1.L_factor, ca.factor());
}

TEST(DpcCondenser, TransformedTargetMatchesTransform) {
  oracle::Rng rng(10);
  const auto fx = dpc_fixture(rng, 2, 2, 2, 2);
  const WeightConfig wc = weights(Matrix::Identity(2, 2), 1e-2 * Matrix::Identity(2, 2));
  const Vector y_ref = oracle::random_vector(rng, 4);
  const ImplicitPredictor pred = implicit_predictor(fx.spc, fx.w, wc.Q_bar(2), wc.lambda_a, y_ref);
  const DpcCondenser c(pred, fx.spc, fx.w, wc);
  const Vector f = c.gradient(oracle::random_vector(rng, 8), oracle::random_vector(rng, 2), y_ref, pred.g);
  EXPECT_EQ(c.transformed_target(f), transform(c.factor(), f).u_unc_t);
}

}  // namespace
