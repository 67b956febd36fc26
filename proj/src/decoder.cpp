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

#include "fcsdpc/decoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>

#include <omp.h>

namespace fcsdpc {

const char* to_string(Method method) { return method == Method::SDA ? "SDA" : "ENUM"; }

Method method_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "sda") return Method::SDA;
  if (s == "enum") return Method::ENUM;
  throw ConfigError("unknown method '" + name + "' (expected sda|enum)");
}

void IlsProblem::validate() const {
  const Eigen::Index n = size();
  detail::require_dims(m >= 1 && Nf >= 1, "IlsProblem: m and Nf must be >= 1");
  detail::require_dims(cs.channels() == m, "IlsProblem: control set channel count != m");
  detail::require_dims(L.rows() == n && L.cols() == n, "IlsProblem: L must be mNf x mNf");
  detail::require_dims(target.size() == n, "IlsProblem: target length != mNf");
  detail::require_dims(u_prev.size() == m, "IlsProblem: u_prev length != m");
  for (Eigen::Index i = 0; i < n; ++i) {
    detail::require_dims(L(i, i) > 0.0, "IlsProblem: L needs a positive diagonal");
    for (Eigen::Index j = i + 1; j < n; ++j)
      detail::require_dims(L(i, j) == 0.0, "IlsProblem: L must be lower triangular");
  }
}

namespace {

inline double row_residual(const Matrix& L, const Vector& t, const double* u, Eigen::Index i) {
  double s = 0.0;
  for (Eigen::Index j = 0; j <= i; ++j) s += L(i, j) * u[j];
  return s - t[i];
}

inline double previous_value(const IlsProblem& p, const double* u, Eigen::Index i) {
  return i < p.m ? p.u_prev[i] : u[i - p.m];
}

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

using Clock = std::chrono::steady_clock;

}  // namespace

double ils_cost(const Matrix& L, const Vector& target, const Vector& u) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double r = row_residual(L, target, u.data(), i);
    d = d + r * r;
  }
  return d;
}

InitialGuess initial_guess(const IlsProblem& p) {
  p.validate();
  const Eigen::Index n = p.size();
  InitialGuess g{Vector(n), std::vector<int>(static_cast<std::size_t>(n)), 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index c = i % p.m;
    double partial = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) partial += p.L(i, j) * g.u[j];
    const double ideal = (p.target[i] - partial) / p.L(i, i);
    const double prev = previous_value(p, g.u.data(), i);
    int best = -1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < p.cs.level_count(c); ++k) {
      const double v = p.cs.level(c, k);
      if (!p.cs.step_allowed(prev, v)) continue;
      const double gap = std::abs(v - ideal);
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    if (best < 0)
      throw InfeasibleError("no level of input channel " + std::to_string(c + 1) +
                            " is reachable from u_prev under the switching bound");
    g.u[i] = p.cs.level(c, best);
    g.labels[static_cast<std::size_t>(i)] = best;
  }
  g.radius = ils_cost(p.L, p.target, g.u);
  return g;
}

namespace {

class SphereDecoder {
 public:
  SphereDecoder(const IlsProblem& p, SolveTrace* trace) : p_(p), trace_(trace) {
    const auto n = static_cast<std::size_t>(p.size());
    u_.resize(p.size());
    labels_.resize(n);
  }

  SolveResult run() {
    const InitialGuess init = initial_guess(p_);
    best_u_ = init.u;
    best_labels_ = init.labels;
    radius_ = init.radius;
    if (trace_) trace_->radii.push_back(radius_);
    search(0, 0.0);

    SolveResult r;
    r.u_opt = best_u_;
    r.labels = best_labels_;
    r.cost = radius_;
    r.nodes_explored = nodes_;
    r.method = Method::SDA;
    return r;
  }

 private:
  void search(Eigen::Index i, double partial) {
    const Eigen::Index c = i % p_.m;
    const double prev = previous_value(p_, u_.data(), i);
    const bool leaf = i + 1 == p_.size();
    const auto at = static_cast<std::size_t>(i);
    for (int k = 0; k < p_.cs.level_count(c); ++k) {
      const double v = p_.cs.level(c, k);
      if (!p_.cs.step_allowed(prev, v)) continue;
      u_[i] = v;
      labels_[at] = k;
      const double r = row_residual(p_.L, p_.target, u_.data(), i);
      const double d = partial + r * r;
      ++nodes_;
      const bool pruned = d > radius_;
      if (trace_) record(i, d, pruned);
      if (pruned) continue;
      if (!leaf) {
        search(i + 1, d);
      } else if (d < radius_) {
        radius_ = d;
        best_u_ = u_;
        best_labels_ = labels_;
        if (trace_) trace_->radii.push_back(radius_);
      } else if (lex_less(labels_, best_labels_)) {
        best_u_ = u_;
        best_labels_ = labels_;
      }
    }
  }

  void record(Eigen::Index i, double d, bool pruned) {
    SolveTrace::Node node;
    node.prefix.assign(labels_.begin(), labels_.begin() + i + 1);
    node.partial = d;
    node.radius = radius_;
    node.pruned = pruned;
    trace_->nodes.push_back(std::move(node));
  }

  const IlsProblem& p_;
  SolveTrace* trace_;
  Vector u_;
  std::vector<int> labels_;
  Vector best_u_;
  std::vector<int> best_labels_;
  double radius_ = 0.0;
  std::uint64_t nodes_ = 0;
};

struct Candidate {
  double cost = std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t feasible = 0;
};

/// Mixed-radix decoding; component 0 is the most significant digit, so the
/// index order is the lexicographic label order.
class CandidateSpace {
 public:
  explicit CandidateSpace(const IlsProblem& p) : p_(p) {
    radix_.resize(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i)
      radix_[static_cast<std::size_t>(i)] = p.cs.level_count(i % p.m);
  }

  void decode(std::uint64_t index, std::vector<int>& labels, Vector& u) const {
    for (std::size_t i = radix_.size(); i-- > 0;) {
      const auto r = static_cast<std::uint64_t>(radix_[i]);
      labels[i] = static_cast<int>(index % r);
      index /= r;
      const auto ii = static_cast<Eigen::Index>(i);
      u[ii] = p_.cs.level(ii % p_.m, labels[i]);
    }
  }

  bool feasible(const Vector& u) const {
    for (Eigen::Index i = 0; i < u.size(); ++i)
      if (!p_.cs.step_allowed(previous_value(p_, u.data(), i), u[i])) return false;
    return true;
  }

  void scan(std::uint64_t begin, std::uint64_t end, Candidate& best) const {
    std::vector<int> labels(radix_.size());
    Vector u(p_.size());
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      decode(idx, labels, u);
      if (!feasible(u)) continue;
      ++best.feasible;
      const double cost = ils_cost(p_.L, p_.target, u);
      if (cost < best.cost) {
        best.cost = cost;
        best.index = idx;
      }
    }
  }

  SolveResult result(const Candidate& best, Method method) const {
    if (best.feasible == 0)
      throw InfeasibleError("enumerate: no sequence satisfies the switching bound from u_prev");
    SolveResult r;
    r.labels.resize(radix_.size());
    r.u_opt.resize(p_.size());
    decode(best.index, r.labels, r.u_opt);
    r.cost = best.cost;
    r.nodes_explored = best.feasible;
    r.method = method;
    return r;
  }

 private:
  const IlsProblem& p_;
  std::vector<int> radix_;
};

void check_cap(const IlsProblem& p, std::uint64_t cap) {
  const std::uint64_t count = candidate_count(p);
  if (count > cap)
    throw ConfigError("enumerate: " + std::to_string(count) +
                      " candidate sequences exceed the cap of " + std::to_string(cap));
}

}  // namespace

void SolveTrace::write_jsonl(std::ostream& os, long step) const {
  const auto prec = os.precision(17);
  const std::string tag = step >= 0 ? "\"step\":" + std::to_string(step) + "," : "";
  for (std::size_t k = 0; k < radii.size(); ++k)
    os << "{" << tag << "\"event\":\"radius\",\"index\":" << k << ",\"value\":" << radii[k] << "}\n";
  for (const Node& n : nodes) {
    os << "{" << tag << "\"event\":\"node\",\"depth\":" << n.prefix.size() << ",\"prefix\":[";
    for (std::size_t k = 0; k < n.prefix.size(); ++k) os << (k ? "," : "") << n.prefix[k];
    os << "],\"partial\":" << n.partial << ",\"radius\":" << n.radius
       << ",\"pruned\":" << (n.pruned ? "true" : "false") << "}\n";
  }
  os.precision(prec);
}

SolveResult sphere_decode(const IlsProblem& problem, SolveTrace* trace) {
  const auto t0 = Clock::now();
  SolveResult r = SphereDecoder(problem, trace).run();
  r.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0);
  return r;
}

std::uint64_t candidate_count(const IlsProblem& p) {
  std::uint64_t count = 1;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const auto r = static_cast<std::uint64_t>(p.cs.level_count(i % p.m));
    if (count > std::numeric_limits<std::uint64_t>::max() / r)
      return std::numeric_limits<std::uint64_t>::max();
    count *= r;
  }
  return count;
}

SolveResult enumerate(const IlsProblem& problem, std::uint64_t cap) {
  const auto t0 = Clock::now();
  problem.validate();
  check_cap(problem, cap);
  const CandidateSpace space(problem);
  Candidate best;
  space.scan(0, candidate_count(problem), best);
  SolveResult r = space.result(best, Method::ENUM);
  r.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0);
  return r;
}

SolveResult enumerate_parallel(const IlsProblem& problem, std::uint64_t cap) {
  const auto t0 = Clock::now();
  problem.validate();
  check_cap(problem, cap);
  const CandidateSpace space(problem);
  const std::uint64_t total = candidate_count(problem);
  Candidate best;
#pragma omp parallel
  {
    const auto threads = static_cast<std::uint64_t>(omp_get_num_threads());
    const auto id = static_cast<std::uint64_t>(omp_get_thread_num());
    const std::uint64_t begin = total * id / threads;
    const std::uint64_t end = total * (id + 1) / threads;
    Candidate local;
    space.scan(begin, end, local);
#pragma omp critical(fcsdpc_enum_reduce)
    {
      best.feasible += local.feasible;
      if (local.cost < best.cost || (local.cost == best.cost && local.index < best.index)) {
        best.cost = local.cost;
        best.index = local.index;
      }
    }
  }
  SolveResult r = space.result(best, Method::ENUM);
  r.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0);
  return r;
}

SolveResult solve(const IlsProblem& problem, Method method) {
  return method == Method::SDA ? sphere_decode(problem) : enumerate(problem);
}

std::vector<SolveResult> solve_batch(std::span<const IlsProblem> problems, Method method) {
  std::vector<SolveResult> results(problems.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(problems.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = solve(problems[static_cast<std::size_t>(i)], method);
    } catch (...) {
#pragma omp critical(fcsdpc_batch_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace fcsdpc
