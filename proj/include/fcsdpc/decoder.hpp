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

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fcsdpc/plant.hpp"

namespace fcsdpc {

/// min ||L u - target||^2 over stacked input sequences u (step-major, m
/// entries per step) drawn from the alphabet and respecting the switching
/// bound relative to u_prev.
struct IlsProblem {
  Matrix L;  ///< lower triangular, positive diagonal
  Vector target;
  ControlSet cs;
  Vector u_prev;
  int Nf = 1;
  Eigen::Index m = 1;

  Eigen::Index size() const { return m * Nf; }
  /// Throws DimensionError on inconsistent shapes or a non-triangular L.
  void validate() const;
};

enum class Method { SDA, ENUM };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

struct SolveResult {
  Vector u_opt;
  std::vector<int> labels;  ///< integer map of u_opt
  double cost = 0.0;
  std::uint64_t nodes_explored = 0;
  std::chrono::nanoseconds wall_time{0};
  Method method = Method::SDA;
};

/// Objective ||L u - target||^2 accumulated row by row. Every solver uses
/// this evaluation order, so equal sequences give bit-equal costs.
double ils_cost(const Matrix& L, const Vector& target, const Vector& u);

struct InitialGuess {
  Vector u;
  std::vector<int> labels;
  double radius = 0.0;
};

/// Sequential nearest-level rounding of the back-substituted unconstrained
/// solution, restricted at every component to levels reachable from the
/// previously fixed input of the same channel.
InitialGuess initial_guess(const IlsProblem& problem);

/// Visited-node log of one sphere-decoding solve.
struct SolveTrace {
  struct Node {
    std::vector<int> prefix;
    double partial = 0.0;
    double radius = 0.0;  ///< incumbent radius when the node was evaluated
    bool pruned = false;
  };
  std::vector<Node> nodes;
  std::vector<double> radii;  ///< initial radius, then every strict decrease

  /// One JSON object per line; `step`, when non-negative, tags every line.
  void write_jsonl(std::ostream& os, long step = -1) const;
};

/// Depth-first branch and bound over components in natural order. Children
/// violating the switching bound are never expanded; a child is pruned when
/// its partial distance exceeds the incumbent radius.
SolveResult sphere_decode(const IlsProblem& problem, SolveTrace* trace = nullptr);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Number of alphabet sequences (saturates at UINT64_MAX).
std::uint64_t candidate_count(const IlsProblem& problem);

/// Exhaustive scan in lexicographic label order; serial reference.
SolveResult enumerate(const IlsProblem& problem,
                      std::uint64_t cap = kDefaultEnumerationCap);

/// Same scan split across OpenMP threads; returns exactly what enumerate()
/// returns (the reduction keeps the lexicographically first minimizer).
SolveResult enumerate_parallel(const IlsProblem& problem,
                               std::uint64_t cap = kDefaultEnumerationCap);

SolveResult solve(const IlsProblem& problem, Method method);

/// Independent instances solved concurrently, one serial solve per instance.
std::vector<SolveResult> solve_batch(std::span<const IlsProblem> problems, Method method);

}  // namespace fcsdpc
