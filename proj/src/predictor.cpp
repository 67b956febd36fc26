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

#include "fcsdpc/predictor.hpp"

#include <cmath>
#include <sstream>

#include "fcsdpc/linalg.hpp"

namespace fcsdpc {

const char* to_string(RegularizerKind kind) {
  return kind == RegularizerKind::Projection ? "projection" : "two_norm";
}

RegularizerKind regularizer_from_string(const std::string& name) {
  if (name == "projection") return RegularizerKind::Projection;
  if (name == "two_norm") return RegularizerKind::TwoNorm;
  throw ConfigError("unknown regularizer '" + name + "' (expected projection|two_norm)");
}

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

/// Orthonormal basis Q (columns) of the row space of a full-row-rank M.
Matrix orthonormal_rows(const Matrix& M) {
  Eigen::HouseholderQR<Matrix> qr(M.transpose());
  return qr.householderQ() * Matrix::Identity(M.cols(), M.rows());
}

/// X - Q Q^T X
Matrix complement(const Matrix& Q, const Matrix& X) { return X - Q * (Q.transpose() * X); }

void check_gram(const Matrix& M, double& cond_out) {
  if (M.cols() < M.rows())
    throw NumericalError("Gram matrix of [Wp; Uf] is singular: " + std::to_string(M.cols()) +
                         " data columns for " + std::to_string(M.rows()) + " rows");
  const double c = linalg::condition_number(M);
  cond_out = c * c;
  if (!(cond_out <= kGramConditionLimit))
    throw NumericalError("Gram matrix of [Wp; Uf] is ill-conditioned (cond " + sci(cond_out) +
                         "); the regularizer weights would be numerically unreliable");
}

}  // namespace

Matrix projection_matrix(const DataMatrix& D) {
  const Matrix M = D.past_and_future_inputs();
  double cond = 0.0;
  check_gram(M, cond);
  const Matrix Q = orthonormal_rows(M);
  return linalg::symmetrize(Q * Q.transpose());
}

SpcPredictor fit_spc(const DataMatrix& D) {
  const Matrix M = D.past_and_future_inputs();
  const Eigen::Index rank = linalg::numerical_rank(M, linalg::kPinvCutoff);
  if (rank < M.rows())
    throw DataQualityError("fit_spc: [Wp; Uf] has numerical rank " + std::to_string(rank) +
                           " < " + std::to_string(M.rows()) + " rows");
  const Matrix K = D.Yf * linalg::pinv(M);
  const Eigen::Index past = (D.m + D.p) * D.Np;
  return {K.leftCols(past), K.rightCols(K.cols() - past)};
}

RegWeights reg_weights(const DataMatrix& D) {
  RegWeights w;
  const Matrix M = D.past_and_future_inputs();
  check_gram(M, w.cond_gram);
  const Matrix Q = orthonormal_rows(M);
  w.Pi = linalg::symmetrize(Q * Q.transpose());

  const Matrix Zy = complement(Q, D.Yf.transpose());
  const Matrix q_inner = linalg::symmetrize(Zy.transpose() * Zy);
  w.cond_Q_inner = linalg::condition_number(q_inner);
  if (!(w.cond_Q_inner <= kConditionWarning))
    w.warnings.push_back("Yf (I - Pi) Yf^T has condition " + sci(w.cond_Q_inner));
  w.Q_reg = linalg::spd_inverse(q_inner, "reg_weights: Yf (I - Pi) Yf^T");

  const Matrix Wp = D.Wp();
  w.Wp_gram_inv = linalg::spd_inverse(Wp * Wp.transpose(), "reg_weights: Wp Wp^T");
  const Matrix Qw = orthonormal_rows(Wp);
  const Matrix Zu = complement(Qw, D.Uf.transpose());
  const Matrix r_inner = linalg::symmetrize(Zu.transpose() * Zu);
  w.cond_R_inner = linalg::condition_number(r_inner);
  if (!(w.cond_R_inner <= kConditionWarning))
    w.warnings.push_back("Uf (I - Pw) Uf^T has condition " + sci(w.cond_R_inner));
  w.R_reg = linalg::spd_inverse(r_inner, "reg_weights: Uf (I - Pw) Uf^T");
  w.Uf_Wp_pinv = D.Uf * Wp.transpose() * w.Wp_gram_inv;
  return w;
}

double h_star(const RegWeights& w, RegularizerKind kind, double lambda_a, const Vector& xi,
              const Vector& u_f, const Vector& y_f, const SpcPredictor& spc) {
  detail::require_dims(xi.size() == spc.O.cols() && u_f.size() == spc.T.cols() &&
                           y_f.size() == spc.O.rows(),
                       "h_star: argument dimensions do not match the predictor");
  const Vector ry = y_f - spc.predict(xi, u_f);
  double h = ry.dot(w.Q_reg * ry);
  if (kind == RegularizerKind::TwoNorm) {
    const Vector ru = u_f - w.Uf_Wp_pinv * xi;
    h += ru.dot(w.R_reg * ru) + xi.dot(w.Wp_gram_inv * xi);
  }
  return lambda_a * h;
}

double h_star_oracle(const DataMatrix& D, RegularizerKind kind, double lambda_a,
                     const Vector& xi, const Vector& u_f, const Vector& y_f) {
  const Matrix Dc = D.constraint_matrix();
  detail::require_dims(xi.size() + u_f.size() + y_f.size() == Dc.rows(),
                       "h_star_oracle: argument dimensions do not match the data");
  Vector d(Dc.rows());
  d << xi, u_f, y_f;

  Vector a;
  double h = 0.0;
  if (kind == RegularizerKind::TwoNorm) {
    a = linalg::pinv(Dc) * d;
    h = a.squaredNorm();
  } else {
    const Eigen::Index l = Dc.cols(), r = Dc.rows();
    const Matrix V = linalg::row_space_basis(D.past_and_future_inputs());
    const Matrix P = Matrix::Identity(l, l) - V * V.transpose();
    Matrix K = Matrix::Zero(l + r, l + r);
    K.topLeftCorner(l, l) = 2.0 * P;
    K.topRightCorner(l, r) = Dc.transpose();
    K.bottomLeftCorner(r, l) = Dc;
    Vector rhs = Vector::Zero(l + r);
    rhs.tail(r) = d;
    a = Eigen::FullPivLU<Matrix>(K).solve(rhs).head(l);
    h = (P * a).squaredNorm();
  }
  const double resid = (Dc * a - d).norm();
  if (!(resid <= 1e-6 * (1.0 + d.norm())))
    throw DataQualityError("h_star_oracle: prediction constraint is inconsistent (residual " +
                           sci(resid) + ")");
  return lambda_a * h;
}

ImplicitPredictor implicit_predictor(const SpcPredictor& spc, const RegWeights& w,
                                     const Matrix& Q_bar, double lambda_a, const Vector& y_ref) {
  const Eigen::Index rows = spc.O.rows();
  detail::require_dims(Q_bar.rows() == rows && Q_bar.cols() == rows && y_ref.size() == rows,
                       "implicit_predictor: Q_bar / y_ref dimension mismatch");
  if (!(lambda_a > 0.0)) throw ConfigError("implicit_predictor: lambda_a must be positive");

  const Matrix blend = linalg::symmetrize(lambda_a * w.Q_reg + Q_bar);
  Eigen::LLT<Matrix> llt(blend);
  if (llt.info() != Eigen::Success)
    throw NumericalError("implicit_predictor: lambda_a Q_reg + Q_bar is not positive definite");

  ImplicitPredictor pred;
  pred.cond_blend = linalg::condition_number(blend);
  if (!(pred.cond_blend <= kConditionWarning))
    pred.warnings.push_back("lambda_a Q_reg + Q_bar has condition " + sci(pred.cond_blend));
  const Matrix lq = lambda_a * w.Q_reg;
  pred.O = llt.solve(lq * spc.O);
  pred.T = llt.solve(lq * spc.T);
  pred.ref_gain = llt.solve(Q_bar);
  pred.g = pred.ref_gain * y_ref;
  pred.dO = pred.O - spc.O;
  pred.dT = pred.T - spc.T;
  return pred;
}

InnerSolution inner_minimizer_oracle(const DataMatrix& D, RegularizerKind kind, double lambda_a,
                                     const Matrix& Q_bar, const Vector& y_ref, const Vector& xi,
                                     const Vector& u_f) {
  const Matrix M = D.past_and_future_inputs();
  detail::require_dims(xi.size() + u_f.size() == M.rows() && y_ref.size() == D.Yf.rows(),
                       "inner_minimizer_oracle: argument dimensions do not match the data");
  Vector b(M.rows());
  b << xi, u_f;
  const Vector a0 = linalg::pinv(M) * b;
  const Matrix N = linalg::null_space_basis(M);
  const Matrix YN = D.Yf * N;

  // a = a0 + N z, with a0 in the row space of M and N orthonormal, so both
  // regularizers contribute lambda ||z||^2 plus a z-independent constant.
  const Vector offset = D.Yf * a0 - y_ref;
  Matrix hess = YN.transpose() * Q_bar * YN;
  hess.diagonal().array() += lambda_a;
  const Vector z = Eigen::LLT<Matrix>(linalg::symmetrize(hess)).solve(
      -(YN.transpose() * (Q_bar * offset)));

  InnerSolution s;
  s.a = a0 + N * z;
  s.y_f = D.Yf * s.a;
  const Vector e = s.y_f - y_ref;
  const double reg = kind == RegularizerKind::TwoNorm ? s.a.squaredNorm() : z.squaredNorm();
  s.value = e.dot(Q_bar * e) + lambda_a * reg;
  return s;
}

}  // namespace fcsdpc
