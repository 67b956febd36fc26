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

#include "fcsdpc/condense.hpp"

#include <algorithm>
#include <sstream>

#include "fcsdpc/linalg.hpp"

namespace fcsdpc {

DiffOperators diff_operators(Eigen::Index m, int Nf) {
  if (m < 1 || Nf < 1) throw DimensionError("diff_operators: m and Nf must be >= 1");
  const Eigen::Index n = m * Nf;
  DiffOperators d{Matrix::Identity(n, n), Matrix::Zero(n, m)};
  for (int k = 1; k < Nf; ++k) d.I_op.block(m * k, m * (k - 1), m, m) = -Matrix::Identity(m, m);
  d.L_op.topRows(m) = Matrix::Identity(m, m);
  return d;
}

Matrix block_diagonal(const Matrix& block, int count) {
  Matrix out = Matrix::Zero(block.rows() * count, block.cols() * count);
  for (int k = 0; k < count; ++k)
    out.block(block.rows() * k, block.cols() * k, block.rows(), block.cols()) = block;
  return out;
}

Matrix WeightConfig::Q_bar(int Nf) const { return block_diagonal(Q, Nf); }
Matrix WeightConfig::R_bar(int Nf) const { return block_diagonal(R, Nf); }

void WeightConfig::validate() const {
  if (!(lambda_a > 0.0)) throw ConfigError("weights: lambda_a must be positive");
  if (Q.rows() != Q.cols() || Q.rows() == 0) throw ConfigError("weights: Q must be square");
  if (R.rows() != R.cols() || R.rows() == 0) throw ConfigError("weights: R must be square");
  auto asymmetric = [](const Matrix& M) {
    return (M - M.transpose()).cwiseAbs().maxCoeff() >
           1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff());
  };
  if (asymmetric(Q)) throw ConfigError("weights: Q must be symmetric");
  if (asymmetric(R)) throw ConfigError("weights: R must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> qe(Q);
  if (qe.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, qe.eigenvalues().cwiseAbs().maxCoeff()))
    throw ConfigError("weights: Q must be positive semidefinite");
  Eigen::LLT<Matrix> rl(R);
  if (rl.info() != Eigen::Success) throw ConfigError("weights: R must be positive definite");
}

Matrix lower_factor(const Matrix& H) {
  detail::require_dims(H.rows() == H.cols(), "lower_factor: H must be square");
  const Eigen::Index n = H.rows();
  // J H J reverses row and column order
  const Matrix JHJ = H.reverse();
  Eigen::LLT<Matrix> llt(JHJ);
  if (llt.info() != Eigen::Success)
    throw NumericalError("lower_factor: matrix is not positive definite");
  const Matrix G = llt.matrixL();
  Matrix L = G.transpose().reverse();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(L(i, i) > 0.0)) throw NumericalError("lower_factor: non-positive pivot");
  return L;
}

Transformed transform(const Matrix& L_factor, const Vector& f) {
  detail::require_dims(L_factor.rows() == f.size() && L_factor.cols() == f.size(),
                       "transform: factor / gradient dimension mismatch");
  // H u = -f with H = L^T L:  L^T w = -f,  L u = w
  Transformed t;
  t.u_unc_t = L_factor.transpose().triangularView<Eigen::Upper>().solve(-f);
  t.u_unc = L_factor.triangularView<Eigen::Lower>().solve(t.u_unc_t);
  return t;
}

namespace {

CondensedProblem finish(Matrix H, Vector f) {
  CondensedProblem cp;
  cp.H = linalg::symmetrize(H);
  cp.f = std::move(f);
  try {
    cp.L_factor = lower_factor(cp.H);
  } catch (const NumericalError&) {
    std::ostringstream os;
    os << "condensed Hessian is not positive definite (condition "
       << linalg::condition_number(cp.H) << ")";
    throw NumericalError(os.str());
  }
  auto t = transform(cp.L_factor, cp.f);
  cp.u_unc = std::move(t.u_unc);
  cp.u_unc_t = std::move(t.u_unc_t);
  return cp;
}

}  // namespace

CondensedProblem condense_mpc(const Matrix& O, const Matrix& T, const WeightConfig& wc,
                              const Vector& x0, const Vector& u_prev, const Vector& y_ref) {
  const auto m = wc.R.rows(), p = wc.Q.rows();
  detail::require_dims(T.cols() % m == 0 && T.rows() % p == 0, "condense_mpc: T shape");
  const int Nf = static_cast<int>(T.cols() / m);
  detail::require_dims(T.rows() == p * Nf && O.rows() == T.rows() && O.cols() == x0.size() &&
                           u_prev.size() == m && y_ref.size() == T.rows(),
                       "condense_mpc: dimension mismatch");
  const auto ops = diff_operators(m, Nf);
  const Matrix Qb = wc.Q_bar(Nf), Rb = wc.R_bar(Nf);
  const Matrix RI = Rb * ops.I_op;
  Matrix H = 2.0 * (T.transpose() * Qb * T + ops.I_op.transpose() * RI);
  Vector f = 2.0 * (T.transpose() * (Qb * (O * x0 - y_ref)) - RI.transpose() * (ops.L_op * u_prev));
  return finish(std::move(H), std::move(f));
}

DpcCondenser::DpcCondenser(const ImplicitPredictor& pred, const SpcPredictor& spc,
                           const RegWeights& w, const WeightConfig& wc) {
  const auto m = wc.R.rows(), p = wc.Q.rows();
  detail::require_dims(pred.T.cols() % m == 0, "DpcCondenser: T_dpc shape");
  const int Nf = static_cast<int>(pred.T.cols() / m);
  detail::require_dims(pred.T.rows() == p * Nf && spc.T.rows() == pred.T.rows() &&
                           spc.O.cols() == pred.O.cols() && w.Q_reg.rows() == p * Nf &&
                           w.R_reg.rows() == m * Nf,
                       "DpcCondenser: predictor / weight dimension mismatch");
  const auto ops = diff_operators(m, Nf);
  const Matrix Qb = wc.Q_bar(Nf), Rb = wc.R_bar(Nf);
  const double lam = wc.lambda_a;

  const Matrix TQ = pred.T.transpose() * Qb;           // T_dpc^T Q
  const Matrix dTQr = lam * pred.dT.transpose() * w.Q_reg;  // lambda dT^T Q_reg
  const Matrix IR = ops.I_op.transpose() * Rb;

  Matrix H = 2.0 * (TQ * pred.T + IR * ops.I_op + dTQr * pred.dT);
  grad_xi_ = 2.0 * (TQ * pred.O + dTQr * pred.dO);
  if (wc.kind == RegularizerKind::TwoNorm) {
    H += 2.0 * lam * w.R_reg;
    grad_xi_ -= 2.0 * lam * w.R_reg * w.Uf_Wp_pinv;
  }
  grad_uprev_ = -2.0 * IR * ops.L_op;
  grad_g_ = 2.0 * (TQ + dTQr);
  grad_ref_ = -2.0 * TQ;

  H_ = linalg::symmetrize(H);
  try {
    L_ = lower_factor(H_);
  } catch (const NumericalError&) {
    std::ostringstream os;
    os << "DPC Hessian is not positive definite (condition " << linalg::condition_number(H_)
       << ", lambda_a Q_reg + Q_bar condition " << pred.cond_blend << ")";
    throw NumericalError(os.str());
  }
}

Vector DpcCondenser::gradient(const Vector& xi, const Vector& u_prev, const Vector& y_ref,
                              const Vector& g) const {
  detail::require_dims(xi.size() == grad_xi_.cols() && u_prev.size() == grad_uprev_.cols() &&
                           y_ref.size() == grad_ref_.cols() && g.size() == grad_g_.cols(),
                       "DpcCondenser::gradient: dimension mismatch");
  return grad_xi_ * xi + grad_uprev_ * u_prev + grad_g_ * g + grad_ref_ * y_ref;
}

Vector DpcCondenser::transformed_target(const Vector& f) const {
  return L_.transpose().triangularView<Eigen::Upper>().solve(-f);
}

CondensedProblem DpcCondenser::problem(const Vector& xi, const Vector& u_prev,
                                       const Vector& y_ref, const Vector& g) const {
  CondensedProblem cp;
  cp.H = H_;
  cp.L_factor = L_;
  cp.f = gradient(xi, u_prev, y_ref, g);
  auto t = transform(L_, cp.f);
  cp.u_unc = std::move(t.u_unc);
  cp.u_unc_t = std::move(t.u_unc_t);
  return cp;
}

CondensedProblem condense_dpc(const ImplicitPredictor& pred, const SpcPredictor& spc,
                              const RegWeights& w, const WeightConfig& wc, const Vector& xi,
                              const Vector& u_prev, const Vector& y_ref) {
  return DpcCondenser(pred, spc, w, wc).problem(xi, u_prev, y_ref, pred.g);
}

}  // namespace fcsdpc
