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

#include <limits>
#include <sstream>

#include "fcsdpc/condense.hpp"
#include "fcsdpc/decoder.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace {

using namespace fcsdpc;

const std::vector<double> kTernary{-1.0, 0.0, 1.0};

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

IlsProblem random_problem(oracle::Rng& rng, Eigen::Index m, int Nf, bool bounded, double cond = 1e3) {
  const Eigen::Index n = m * Nf;
  const Matrix L = lower_factor(oracle::random_spd(rng, n, cond));
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Vector cont(n);
  for (Eigen::Index i = 0; i < n; ++i) cont[i] = u(rng);
  std::uniform_int_distribution<int> lvl(0, 2);
  Vector prev(m);
  for (Eigen::Index c = 0; c < m; ++c) prev[c] = kTernary[static_cast<std::size_t>(lvl(rng))];
  ControlSet cs = bounded ? ControlSet(kTernary, m, 1.0) : ControlSet(kTernary, m);
  return IlsProblem{L, L * cont, std::move(cs), prev, Nf, m};
}

/// Feasible nodes of the full search tree, all depths.
std::uint64_t feasible_prefixes(const IlsProblem& p) {
  std::uint64_t total = 0;
  std::vector<Vector> frontier{p.u_prev};
  std::vector<Vector> partial{Vector(0)};
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Eigen::Index c = i % p.m;
    std::vector<Vector> next_frontier, next_partial;
    for (std::size_t k = 0; k < partial.size(); ++k) {
      for (double v : p.cs.levels(c)) {
        Vector last = frontier[k];
        if (p.cs.delta_bound() && std::abs(v - last[c]) > *p.cs.delta_bound() + 1e-12) continue;
        last[c] = v;
        Vector u(partial[k].size() + 1);
        u << partial[k], v;
        next_frontier.push_back(last);
        next_partial.push_back(u);
      }
    }
    total += next_partial.size();
    frontier = std::move(next_frontier);
    partial = std::move(next_partial);
  }
  return total;
}

TEST(InitialGuess, RoundsToNearestLevels) {
  const IlsProblem p{Matrix::Identity(2, 2), vec({0.2, -0.4}), ControlSet(kTernary, 2), vec({0, 0}), 1, 2};
  const InitialGuess g = initial_guess(p);
  EXPECT_EQ(g.u, vec({0, 0}));
  EXPECT_DOUBLE_EQ(g.radius, 0.2 * 0.2 + 0.4 * 0.4);
}

TEST(InitialGuess, LatticeTargetHasZeroRadius) {
  oracle::Rng rng(1);
  const Matrix L = lower_factor(oracle::random_spd(rng, 4, 10.0));
  const Vector u = vec({1, 0, 0, 1});
  const IlsProblem p{L, L * u, ControlSet(kTernary, 2, 1.0), vec({1, 0}), 2, 2};
  const InitialGuess g = initial_guess(p);
  EXPECT_EQ(g.u, u);
  EXPECT_LE(g.radius, 1e-28);
}

TEST(InitialGuess, ClampsToReachableLevel) {
  const IlsProblem p{Matrix::Identity(1, 1), vec({-1}), ControlSet(kTernary, 1, 1.0), vec({1}), 1, 1};
  // feasible first components from u_prev = 1 are {0, 1}; 0 is the closest to -1
  std::vector<double> reachable;
  for (double v : kTernary)
    if (std::abs(v - 1.0) <= 1.0) reachable.push_back(v);
  ASSERT_EQ(reachable, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(initial_guess(p).u, vec({0}));
}

TEST(InitialGuess, InfeasibleAlphabetIsRejected) {
  const IlsProblem p{Matrix::Identity(1, 1), vec({0}), ControlSet({-2.0, 2.0}, 1, 1.0), vec({0}), 1, 1};
  EXPECT_THROW(initial_guess(p), InfeasibleError);
  EXPECT_THROW(sphere_decode(p), InfeasibleError);
  EXPECT_THROW(enumerate(p), InfeasibleError);
}

TEST(SphereDecode, IdentityRounding) {
  const IlsProblem p{Matrix::Identity(2, 2), vec({0.2, -0.4}), ControlSet(kTernary, 2), vec({0, 0}), 1, 2};
  EXPECT_EQ(sphere_decode(p).u_opt, vec({0, 0}));
}

TEST(SphereDecode, SwitchingBoundForcesIntermediateStep) {
  const IlsProblem p{Matrix::Identity(2, 2), vec({-1, -1}), ControlSet(kTernary, 1, 1.0), vec({1}), 2, 1};
  const SolveResult r = sphere_decode(p);
  EXPECT_EQ(r.u_opt, vec({0, -1}));
  EXPECT_DOUBLE_EQ(r.cost, 1.0);
  const auto brute = oracle::brute_force_ils(p.L, p.target, p.cs, p.u_prev, 2);
  ASSERT_TRUE(brute);
  EXPECT_EQ(brute->feasible, 5u);
  EXPECT_EQ(brute->u, r.u_opt);
}

TEST(SphereDecode, AgreesWithEnumerationAndBruteForce) {
  oracle::Rng rng(2);
  for (int inst = 0; inst < 500; ++inst) {
    const Eigen::Index m = 1 + inst % 3;
    const int Nf = 1 + (inst / 3) % 4;
    const IlsProblem p = random_problem(rng, m, Nf, inst % 2 == 0);
    const SolveResult s = sphere_decode(p);
    const SolveResult e = enumerate(p);
    ASSERT_EQ(s.u_opt, e.u_opt) << "instance " << inst;
    ASSERT_EQ(s.cost, e.cost) << "instance " << inst;
    EXPECT_EQ(s.labels, e.labels);
    EXPECT_TRUE(is_feasible(s.u_opt, p.cs, p.u_prev));
    EXPECT_NEAR(s.cost, (p.L * s.u_opt - p.target).squaredNorm(), 1e-12 * (1.0 + s.cost));
    if (m * Nf <= 8) {
      const auto brute = oracle::brute_force_ils(p.L, p.target, p.cs, p.u_prev, Nf);
      ASSERT_TRUE(brute);
      EXPECT_NEAR(brute->cost, s.cost, 1e-10 * (1.0 + s.cost));
      EXPECT_EQ(brute->feasible, e.nodes_explored);
      EXPECT_LE(s.nodes_explored, feasible_prefixes(p)) << "instance " << inst;
    }
  }
}

TEST(SphereDecode, TiesResolveToLexicographicallySmallest) {
  // target midway between -1 and 0, and between 0 and 1: four equal-cost points
  const IlsProblem p{Matrix::Identity(2, 2), vec({-0.5, 0.5}), ControlSet(kTernary, 2), vec({0, 0}), 1, 2};
  const SolveResult s = sphere_decode(p), e = enumerate(p);
  EXPECT_EQ(s.u_opt, vec({-1, 0}));
  EXPECT_EQ(e.u_opt, vec({-1, 0}));
  EXPECT_EQ(s.cost, e.cost);
}

TEST(SphereDecode, RadiiStrictlyDecrease) {
  oracle::Rng rng(3);
  for (int inst = 0; inst < 50; ++inst) {
    const IlsProblem p = random_problem(rng, 3, 3, inst % 2 == 0, 1e5);
    SolveTrace trace;
    const SolveResult r = sphere_decode(p, &trace);
    ASSERT_FALSE(trace.radii.empty());
    for (std::size_t k = 1; k < trace.radii.size(); ++k) EXPECT_LT(trace.radii[k], trace.radii[k - 1]);
    EXPECT_EQ(trace.radii.back(), r.cost);
    EXPECT_EQ(trace.nodes.size(), r.nodes_explored);
  }
}

/// Cheapest feasible completion of a label prefix.
double best_completion(const IlsProblem& p, std::vector<int> labels) {
  const Eigen::Index n = p.size();
  if (static_cast<Eigen::Index>(labels.size()) == n) {
    Vector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = p.cs.level(i % p.m, labels[static_cast<std::size_t>(i)]);
    return is_feasible(u, p.cs, p.u_prev) ? (p.L * u - p.target).squaredNorm()
                                          : std::numeric_limits<double>::infinity();
  }
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Index c = static_cast<Eigen::Index>(labels.size()) % p.m;
  for (int k = 0; k < p.cs.level_count(c); ++k) {
    labels.push_back(k);
    best = std::min(best, best_completion(p, labels));
    labels.pop_back();
  }
  return best;
}

TEST(SphereDecode, PrunedSubtreesHoldNothingBetter) {
  oracle::Rng rng(4);
  int pruned = 0;
  for (int inst = 0; inst < 30; ++inst) {
    const IlsProblem p = random_problem(rng, 2, 2 + inst % 2, inst % 2 == 1, 1e4);
    SolveTrace trace;
    sphere_decode(p, &trace);
    for (const auto& node : trace.nodes) {
      if (!node.pruned) continue;
      ++pruned;
      EXPECT_GT(best_completion(p, node.prefix) * (1.0 + 1e-12), node.radius);
    }
  }
  EXPECT_GT(pruned, 0);
}

TEST(SphereDecode, TraceWritesJsonLines) {
  oracle::Rng rng(5);
  const IlsProblem p = random_problem(rng, 2, 2, true);
  SolveTrace trace;
  sphere_decode(p, &trace);
  std::stringstream ss;
  trace.write_jsonl(ss, 17);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("step"), 17);
    EXPECT_TRUE(j.at("event") == "radius" || j.at("event") == "node");
    ++lines;
  }
  EXPECT_EQ(lines, trace.nodes.size() + trace.radii.size());
}

TEST(Enumerate, SingletonAlphabet) {
  const IlsProblem p{Matrix::Identity(2, 2), vec({3, -7}), ControlSet({0.5}, 1), vec({0.5}), 2, 1};
  const SolveResult r = enumerate(p);
  EXPECT_EQ(r.u_opt, vec({0.5, 0.5}));
  EXPECT_EQ(r.nodes_explored, 1u);
  EXPECT_EQ(sphere_decode(p).u_opt, r.u_opt);
}

TEST(Enumerate, DominatesRandomFeasibleSequences) {
  oracle::Rng rng(6);
  const IlsProblem p = random_problem(rng, 3, 3, true);
  const SolveResult r = enumerate(p);
  std::uniform_int_distribution<int> lvl(0, 2);
  int checked = 0;
  while (checked < 100) {
    Vector u(9);
    for (Eigen::Index i = 0; i < 9; ++i) u[i] = kTernary[static_cast<std::size_t>(lvl(rng))];
    if (!is_feasible(u, p.cs, p.u_prev)) continue;
    EXPECT_LE(r.cost, ils_cost(p.L, p.target, u));
    ++checked;
  }
}

TEST(Enumerate, CapIsEnforced) {
  oracle::Rng rng(7);
  const IlsProblem p = random_problem(rng, 3, 4, false);
  EXPECT_EQ(candidate_count(p), 531441u);
  EXPECT_THROW(enumerate(p, 1000), ConfigError);
  EXPECT_THROW(enumerate_parallel(p, 1000), ConfigError);
}

TEST(Enumerate, ParallelMatchesSerial) {
  oracle::Rng rng(8);
  for (int inst = 0; inst < 40; ++inst) {
    const IlsProblem p = random_problem(rng, 1 + inst % 3, 1 + inst % 4, inst % 2 == 0);
    const SolveResult a = enumerate(p), b = enumerate_parallel(p);
    EXPECT_EQ(a.u_opt, b.u_opt);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_EQ(a.nodes_explored, b.nodes_explored);
  }
}

TEST(SolveBatch, MatchesIndividualSolves) {
  oracle::Rng rng(9);
  std::vector<IlsProblem> problems;
  for (int i = 0; i < 25; ++i) problems.push_back(random_problem(rng, 2, 1 + i % 3, i % 2 == 0));
  for (Method method : {Method::SDA, Method::ENUM}) {
    const auto batch = solve_batch(problems, method);
    ASSERT_EQ(batch.size(), problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i) {
      const SolveResult one = solve(problems[i], method);
      EXPECT_EQ(batch[i].u_opt, one.u_opt);
      EXPECT_EQ(batch[i].cost, one.cost);
      EXPECT_EQ(batch[i].method, method);
    }
  }
}

TEST(IlsProblem, ValidationRejectsBadShapes) {
  IlsProblem p{Matrix::Identity(2, 2), vec({0, 0}), ControlSet(kTernary, 2), vec({0, 0}), 1, 2};
  EXPECT_NO_THROW(p.validate());
  p.target = vec({0});
  EXPECT_THROW(p.validate(), DimensionError);
  p.target = vec({0, 0});
  p.L(0, 1) = 1.0;
  EXPECT_THROW(p.validate(), DimensionError);
}

TEST(Method, ParsesCaseInsensitively) {
  EXPECT_EQ(method_from_string("sda"), Method::SDA);
  EXPECT_EQ(method_from_string("ENUM"), Method::ENUM);
  EXPECT_EQ(method_from_string("Enum"), Method::ENUM);
  EXPECT_THROW(method_from_string("miqp"), ConfigError);
  EXPECT_STREQ(to_string(Method::SDA), "SDA");
}

}  // namespace
