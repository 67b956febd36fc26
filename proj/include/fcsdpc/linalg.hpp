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

#include "fcsdpc/types.hpp"

namespace fcsdpc::linalg {

/// Relative singular-value cutoff used for pseudoinverses.
inline constexpr double kPinvCutoff = 1e-10;

/// Moore-Penrose pseudoinverse through a singular value decomposition;
/// singular values below `rel_cutoff * sigma_max` are treated as zero.
Matrix pinv(const Matrix& M, double rel_cutoff = kPinvCutoff);

/// Count of singular values strictly above `rel_tol * sigma_max`.
Eigen::Index numerical_rank(const Matrix& M, double rel_tol);

/// 2-norm condition number sigma_max / sigma_min (infinity when singular).
double condition_number(const Matrix& M);

/// Inverse of a symmetric positive definite matrix via Cholesky, returned
/// symmetrized. Throws NumericalError when the factorization fails.
Matrix spd_inverse(const Matrix& S, const char* what);

inline Matrix symmetrize(const Matrix& M) { return 0.5 * (M + M.transpose()); }

/// Orthonormal basis of the row space of M (columns of the result).
Matrix row_space_basis(const Matrix& M, double rel_cutoff = kPinvCutoff);

/// Orthonormal basis of the null space of M (columns of the result).
Matrix null_space_basis(const Matrix& M, double rel_cutoff = kPinvCutoff);

/// FNV-1a over the raw bytes of the coefficients; equal only for
/// bit-identical matrices of equal shape.
std::uint64_t checksum(const Matrix& M);

}  // namespace fcsdpc::linalg
