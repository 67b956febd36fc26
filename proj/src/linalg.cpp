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

#include "fcsdpc/linalg.hpp"

#include <cstring>
#include <limits>
#include <string>

namespace fcsdpc::linalg {

namespace {

Eigen::Index rank_from(const Vector& sv, double rel_cutoff) {
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  const double cut = rel_cutoff * sv[0];
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cut) ++r;
  return r;
}

}  // namespace

Matrix pinv(const Matrix& M, double rel_cutoff) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const Eigen::Index r = rank_from(sv, rel_cutoff);
  if (r == 0) return Matrix::Zero(M.cols(), M.rows());
  return svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal() *
         svd.matrixU().leftCols(r).transpose();
}

Eigen::Index numerical_rank(const Matrix& M, double rel_tol) {
  if (M.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(M);
  return rank_from(svd.singularValues(), rel_tol);
}

double condition_number(const Matrix& M) {
  if (M.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::BDCSVD<Matrix> svd(M);
  const Vector& sv = svd.singularValues();
  const double lo = sv[sv.size() - 1];
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / lo;
}

Matrix spd_inverse(const Matrix& S, const char* what) {
  Eigen::LLT<Matrix> llt(symmetrize(S));
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
  return symmetrize(llt.solve(Matrix::Identity(S.rows(), S.cols())));
}

Matrix row_space_basis(const Matrix& M, double rel_cutoff) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Eigen::Index r = rank_from(svd.singularValues(), rel_cutoff);
  return svd.matrixV().leftCols(r);
}

Matrix null_space_basis(const Matrix& M, double rel_cutoff) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Eigen::Index r = rank_from(svd.singularValues(), rel_cutoff);
  return svd.matrixV().rightCols(M.cols() - r);
}

std::uint64_t checksum(const Matrix& M) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  const Eigen::Index dims[2] = {M.rows(), M.cols()};
  mix(dims, sizeof(dims));
  mix(M.data(), static_cast<std::size_t>(M.size()) * sizeof(double));
  return h;
}

}  // namespace fcsdpc::linalg
