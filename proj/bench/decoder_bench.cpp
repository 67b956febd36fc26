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

// Serial enumeration, OpenMP enumeration and sphere decoding on identical
// random instances. Run with --benchmark_filter to pick one solver.

#include <benchmark/benchmark.h>

#include <random>

#include "fcsdpc/condense.hpp"
#include "fcsdpc/decoder.hpp"
#include "fcsdpc/random.hpp"

namespace {

using namespace fcsdpc;

std::vector<IlsProblem> instances(Eigen::Index m, int Nf, int count) {
  random::Rng rng(2026);
  const std::vector<double> levels{-1.0, 0.0, 1.0};
  std::vector<IlsProblem> out;
  for (int i = 0; i < count; ++i) {
    const Eigen::Index n = m * Nf;
    const Matrix L = lower_factor(random::spd(rng, n, 1e3));
    Vector u_prev = Vector::Zero(m);
    out.push_back(IlsProblem{L, L * random::gaussian(rng, n), ControlSet(levels, m, 1.0), u_prev, Nf, m});
  }
  return out;
}

template <class Solve>
void run(benchmark::State& state, Solve solve) {
  const auto problems = instances(state.range(0), static_cast<int>(state.range(1)), 16);
  std::size_t i = 0;
  std::uint64_t nodes = 0;
  for (auto _ : state) {
    const SolveResult r = solve(problems[i++ % problems.size()]);
    nodes += r.nodes_explored;
    benchmark::DoNotOptimize(r.cost);
  }
  state.counters["nodes"] = benchmark::Counter(static_cast<double>(nodes), benchmark::Counter::kAvgIterations);
}

void BM_Enumerate(benchmark::State& state) {
  run(state, [](const IlsProblem& p) { return enumerate(p); });
}
void BM_EnumerateParallel(benchmark::State& state) {
  run(state, [](const IlsProblem& p) { return enumerate_parallel(p); });
}
void BM_SphereDecode(benchmark::State& state) {
  run(state, [](const IlsProblem& p) { return sphere_decode(p); });
}

void BM_SolveBatch(benchmark::State& state) {
  const auto problems = instances(state.range(0), static_cast<int>(state.range(1)), 64);
  const Method method = state.range(2) == 0 ? Method::SDA : Method::ENUM;
  for (auto _ : state) benchmark::DoNotOptimize(solve_batch(problems, method).size());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(problems.size()));
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int Nf = 1; Nf <= 4; ++Nf) b->Args({3, Nf});
}

}  // namespace

BENCHMARK(BM_Enumerate)->Apply(shapes);
BENCHMARK(BM_EnumerateParallel)->Apply(shapes);
BENCHMARK(BM_SphereDecode)->Apply(shapes);
BENCHMARK(BM_SolveBatch)->Args({3, 2, 0})->Args({3, 2, 1});

BENCHMARK_MAIN();
