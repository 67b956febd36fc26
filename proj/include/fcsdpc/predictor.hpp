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

#include <string>
#include <vector>

#include "fcsdpc/data.hpp"

namespace fcsdpc {

/// h(a) = lambda ||(I - Pi) a||^2  or  h(a) = lambda ||a||^2.
enum class RegularizerKind { Projection, TwoNorm };

const char* to_string(RegularizerKind kind);
RegularizerKind regularizer_from_string(const std::string& name);

/// Least-squares multi-step predictor y_f = O xi + T u_f with
/// [O T] = Yf * pinv([Wp; Uf]). xi is ordered (u_p, y_p).
struct SpcPredictor {
  Matrix O;
  Matrix T;

  Vector predict(const Vector& xi, const Vector& u_f) const { return O * xi + T * u_f; }
};

/// Weight matrices of the closed-form regularizer cost plus cached factors.
struct RegWeights {
  Matrix Q_reg;        ///< (Yf (I - Pi) Yf^T)^-1
  Matrix R_reg;        ///< (Uf (I - Wp^T (Wp Wp^T)^-1 Wp) Uf^T)^-1
  Matrix Wp_gram_inv;  ///< (Wp Wp^T)^-1
  Matrix Uf_Wp_pinv;   ///< Uf Wp^+
  Matrix Pi;           ///< projector onto the row space of [Wp; Uf]

  double cond_Q_inner = 0.0;  ///< condition of Yf (I - Pi) Yf^T
  double cond_R_inner = 0.0;
  double cond_gram = 0.0;     ///< condition of [Wp; Uf][Wp; Uf]^T
  std::vector<std::string> warnings;
};

/// Affine implicit predictor y_f = O xi + T u_f + g, together with the
/// differences to the SPC predictor. `ref_gain` maps a reference window to
/// its offset: g = ref_gain * y_ref.
struct ImplicitPredictor {
  Matrix O;
  Matrix T;
  Vector g;
  Matrix dO;
  Matrix dT;
  Matrix ref_gain;
  double cond_blend = 0.0;  ///< condition of lambda Q_reg + Q_bar
  std::vector<std::string> warnings;

  Vector predict(const Vector& xi, const Vector& u_f) const { return O * xi + T * u_f + g; }
  Vector offset_for(const Vector& y_ref) const { return ref_gain * y_ref; }
};

/// Above this, condition numbers are reported as warnings.
inline constexpr double kConditionWarning = 1e12;
/// Above this, the Gram matrix of [Wp; Uf] is treated as singular.
inline constexpr double kGramConditionLimit = 1e14;

/// Pi = M^T (M M^T)^-1 M with M = [Wp; Uf].
Matrix projection_matrix(const DataMatrix& D);

SpcPredictor fit_spc(const DataMatrix& D);

RegWeights reg_weights(const DataMatrix& D);

/// Closed-form minimum of h(a) over the generator vectors reproducing
/// (xi, u_f, y_f).
double h_star(const RegWeights& w, RegularizerKind kind, double lambda_a,
              const Vector& xi, const Vector& u_f, const Vector& y_f,
              const SpcPredictor& spc);

/// Reference evaluation of the same minimum by solving the equality
/// constrained problem over a directly (pseudoinverse for the two-norm,
/// KKT system for the projection regularizer).
double h_star_oracle(const DataMatrix& D, RegularizerKind kind, double lambda_a,
                     const Vector& xi, const Vector& u_f, const Vector& y_f);

ImplicitPredictor implicit_predictor(const SpcPredictor& spc, const RegWeights& w,
                                     const Matrix& Q_bar, double lambda_a,
                                     const Vector& y_ref);

/// Minimizer over (y_f, a) of ||y_f - y_ref||^2_Q + h(a) subject to
/// [Wp; Uf; Yf] a = (xi, u_f, y_f), computed on the null space of [Wp; Uf]
/// without any of the closed-form weights. Used to check the implicit
/// predictor.
struct InnerSolution {
  Vector y_f;
  Vector a;
  double value = 0.0;  ///< ||y_f - y_ref||^2_Q + h(a)
};

InnerSolution inner_minimizer_oracle(const DataMatrix& D, RegularizerKind kind,
                                     double lambda_a, const Matrix& Q_bar,
                                     const Vector& y_ref, const Vector& xi,
                                     const Vector& u_f);

}  // namespace fcsdpc
