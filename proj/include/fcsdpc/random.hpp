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

#include <random>

#include "fcsdpc/plant.hpp"

namespace fcsdpc::random {

using Rng = std::mt19937_64;

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector gaussian(Rng& rng, Eigen::Index size);

/// Random orthogonal matrix (QR of a Gaussian matrix with sign-fixed R).
Matrix orthogonal(Rng& rng, Eigen::Index n);

/// A = Q S Q^T with S block diagonal (2x2 rotations scaled by radii in
/// (0, spectral_radius], plus a real eigenvalue for odd n); B and C Gaussian.
PlantModel stable_plant(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p,
                        double spectral_radius = 0.95);

/// Symmetric positive definite with eigenvalues log-uniform in [1, cond].
Matrix spd(Rng& rng, Eigen::Index n, double cond = 1e3);

/// Uniformly random alphabet sequence of `steps` inputs (no switching bound).
Vector alphabet_sequence(Rng& rng, const ControlSet& cs, int steps);

/// Random sequence that respects the switching bound from u_prev.
Vector feasible_sequence(Rng& rng, const ControlSet& cs, const Vector& u_prev, int steps);

}  // namespace fcsdpc::random
