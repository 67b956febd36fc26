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

#include "fcsdpc/predictor.hpp"

namespace fcsdpc {

/// Delta u_f = I_op u_f - L_op u(-1).
struct DiffOperators {
  Matrix I_op;  ///< mNf x mNf, identity blocks on the diagonal, -identity below
  Matrix L_op;  ///< mNf x m, [I; 0; ...; 0]
};

DiffOperators diff_operators(Eigen::Index m, int Nf);

/// Per-step weights; the stacked block-diagonal versions are built on demand.
struct WeightConfig {
  Matrix Q;  ///< p x p, symmetric positive semidefinite
  Matrix R;  ///< m x m, symmetric positive definite
  double lambda_a = 1e3;
  RegularizerKind kind = RegularizerKind::Projection;

  bool operator==(const WeightConfig& o) const {
    return detail::same(Q, o.Q) && detail::same(R, o.R) && lambda_a == o.lambda_a &&
           kind == o.kind;
  }

  Matrix Q_bar(int Nf) const;
  Matrix R_bar(int Nf) const;
  /// Throws ConfigError unless Q is PSD, R is PD and lambda_a > 0.
  void validate() const;
};

Matrix block_diagonal(const Matrix& block, int count);

/// 1/2 u^T H u + f^T u, with L^T L = H (L lower triangular), the
/// unconstrained optimum and its image under L.
struct CondensedProblem {
  Matrix H;
  Vector f;
  Matrix L_factor;
  Vector u_unc;
  Vector u_unc_t;
};

/// Lower-triangular L with positive diagonal and L^T L = H, obtained from the
/// Cholesky factor of the exchange-permuted matrix J H J.
Matrix lower_factor(const Matrix& H);

struct Transformed {
  Vector u_unc;
  Vector u_unc_t;
};

/// u_unc = -H^-1 f and u_unc_t = L u_unc, both through the triangular factor.
Transformed transform(const Matrix& L_factor, const Vector& f);

CondensedProblem condense_mpc(const Matrix& O, const Matrix& T, const WeightConfig& wc,
                              const Vector& x0, const Vector& u_prev, const Vector& y_ref);

/// Condensed problem of the implicit-predictor formulation. The Hessian and
/// its factor depend only on the predictor and the weights; the gradient is an
/// affine function of (xi, u_prev, y_ref, g) and is the only per-step work.
class DpcCondenser {
 public:
  DpcCondenser(const ImplicitPredictor& pred, const SpcPredictor& spc, const RegWeights& w,
               const WeightConfig& wc);

  const Matrix& hessian() const { return H_; }
  const Matrix& factor() const { return L_; }

  Vector gradient(const Vector& xi, const Vector& u_prev, const Vector& y_ref,
                  const Vector& g) const;
  /// -L^-T f, i.e. L times the unconstrained optimum.
  Vector transformed_target(const Vector& f) const;
  CondensedProblem problem(const Vector& xi, const Vector& u_prev, const Vector& y_ref,
                           const Vector& g) const;

 private:
  Matrix H_, L_;
  Matrix grad_xi_, grad_uprev_, grad_g_, grad_ref_;
};

CondensedProblem condense_dpc(const ImplicitPredictor& pred, const SpcPredictor& spc,
                              const RegWeights& w, const WeightConfig& wc, const Vector& xi,
                              const Vector& u_prev, const Vector& y_ref);

}  // namespace fcsdpc
