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

#include "fcsdpc/loop.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "fcsdpc/linalg.hpp"

namespace fcsdpc {

XiBuffer::XiBuffer(int Np, Eigen::Index m, Eigen::Index p) : Np_(Np), m_(m), p_(p) {
  if (Np < 1) throw DimensionError("XiBuffer: Np must be >= 1");
}

void XiBuffer::push(const Vector& u, const Vector& y) {
  detail::require_dims(u.size() == m_ && y.size() == p_, "XiBuffer::push: dimension mismatch");
  u_hist_.push_back(u);
  y_hist_.push_back(y);
  if (static_cast<int>(u_hist_.size()) > Np_) {
    u_hist_.pop_front();
    y_hist_.pop_front();
  }
}

Vector XiBuffer::xi() const {
  if (!full()) throw DimensionError("XiBuffer: past window is not filled yet");
  Vector xi((m_ + p_) * Np_);
  for (int i = 0; i < Np_; ++i) {
    xi.segment(m_ * i, m_) = u_hist_[static_cast<std::size_t>(i)];
    xi.segment(m_ * Np_ + p_ * i, p_) = y_hist_[static_cast<std::size_t>(i)];
  }
  return xi;
}

ReferenceSignal ReferenceSignal::constant(Vector level) {
  ReferenceSignal r;
  r.kind = Kind::Constant;
  r.value = std::move(level);
  return r;
}

ReferenceSignal ReferenceSignal::sine(Vector amplitude, double period, Vector offset) {
  if (!(period > 0.0)) throw ConfigError("reference: sine period must be positive");
  if (amplitude.size() != offset.size())
    throw ConfigError("reference: sine amplitude/offset length mismatch");
  ReferenceSignal r;
  r.kind = Kind::Sine;
  r.amplitude = std::move(amplitude);
  r.period = period;
  r.value = std::move(offset);
  return r;
}

ReferenceSignal ReferenceSignal::step(Vector before, Vector after, long at) {
  if (before.size() != after.size()) throw ConfigError("reference: step level length mismatch");
  ReferenceSignal r;
  r.kind = Kind::Step;
  r.value = std::move(before);
  r.after = std::move(after);
  r.at = at;
  return r;
}

Vector ReferenceSignal::operator()(long k) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Sine:
      return value + amplitude * std::sin(2.0 * M_PI * static_cast<double>(k) / period);
    case Kind::Step:
      return k < at ? value : after;
  }
  return value;
}

Vector ReferenceSignal::window(long k, int Nf) const {
  const Eigen::Index p = value.size();
  Vector w(p * Nf);
  for (int i = 0; i < Nf; ++i) w.segment(p * i, p) = (*this)(k + 1 + i);
  return w;
}

DpcController::DpcController(ImplicitPredictor pred, SpcPredictor spc, RegWeights weights,
                             WeightConfig wc, ControlSet cs, int Np, int Nf)
    : pred_(std::move(pred)),
      spc_(std::move(spc)),
      weights_(std::move(weights)),
      wc_(std::move(wc)),
      cs_(std::move(cs)),
      Np_(Np),
      Nf_(Nf),
      condenser_(pred_, spc_, weights_, wc_) {
  detail::require_dims(cs_.channels() == wc_.R.rows(),
                       "DpcController: control set / weight dimension mismatch");
}

DpcController::Output DpcController::step(const XiBuffer& buffer, const ReferenceSignal& ref,
                                          long k, Method method, SolveTrace* trace) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const Vector y_ref = ref.window(k, Nf_);
  if (!ref_window_ || *ref_window_ != y_ref) {
    g_ = pred_.offset_for(y_ref);
    ref_window_ = y_ref;
  }
  const Vector xi = buffer.xi();
  const Vector& u_prev = buffer.u_prev();
  const Vector f = condenser_.gradient(xi, u_prev, y_ref, g_);

  IlsProblem problem{condenser_.factor(), condenser_.transformed_target(f), cs_, u_prev, Nf_,
                     cs_.channels()};
  Output out;
  out.solve = method == Method::SDA ? sphere_decode(problem, trace) : enumerate(problem);
  out.step_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0);
  out.u_sequence = out.solve.u_opt;
  out.u_apply = out.solve.u_opt.head(cs_.channels());
  return out;
}

namespace {

constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ull;

Vector sample_feasible(const ControlSet& cs, const Vector* prev, std::mt19937_64& rng) {
  Vector u(cs.channels());
  for (Eigen::Index c = 0; c < cs.channels(); ++c) {
    std::uniform_int_distribution<int> pick(0, cs.level_count(c) - 1);
    double v = cs.level(c, pick(rng));
    if (prev)
      while (!cs.step_allowed((*prev)[c], v)) v = cs.level(c, pick(rng));
    u[c] = v;
  }
  return u;
}

void add_noise(Vector& y, const Vector& sigma, std::mt19937_64& rng) {
  if (sigma.size() == 0) return;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index c = 0; c < y.size(); ++c) y[c] += sigma[c] * gauss(rng);
}

}  // namespace

Warmup warmup(const PlantModel& plant, const ControlSet& cs, int Np, std::uint64_t seed,
              const Vector& noise_sigma) {
  detail::require_dims(cs.channels() == plant.m(), "warmup: control set / plant mismatch");
  detail::require_dims(noise_sigma.size() == 0 || noise_sigma.size() == plant.p(),
                       "warmup: noise sigma length != p");
  std::mt19937_64 rng(seed);
  std::mt19937_64 noise_rng(seed ^ kNoiseStream);
  Warmup w{XiBuffer(Np, plant.m(), plant.p()), Vector::Zero(plant.n())};
  Vector prev;
  for (int k = 0; k < Np; ++k) {
    Vector u = sample_feasible(cs, k == 0 ? nullptr : &prev, rng);
    auto out = step(plant, w.x, u);
    add_noise(out.y, noise_sigma, noise_rng);
    w.buffer.push(u, out.y);
    w.x = std::move(out.x_next);
    prev = std::move(u);
  }
  return w;
}

PreparedScenario prepare(const Scenario& s) {
  s.weights.validate();
  detail::require_dims(s.cs.channels() == s.plant.m(), "scenario: control set / plant mismatch");
  detail::require_dims(s.weights.Q.rows() == s.plant.p() && s.weights.R.rows() == s.plant.m(),
                       "scenario: Q must be p x p and R must be m x m");
  PreparedScenario prep;
  CollectionPlan plan{s.Np, std::max(s.Nf, s.collect_Nf), s.collect_steps, 1'000'000};
  prep.clean = collect_persistent(s.plant, s.cs, plan, s.data_seed, Vector::Zero(s.plant.n()));
  prep.data = add_output_noise(prep.clean, NoiseSpec{s.snr_db, data_noise_seed(s.data_seed)});
  prep.D = build_hankel(prep.data, s.Np, s.Nf);
  prep.rank = check_rank(prep.D, s.plant.n());
  if (!prep.rank.full_row_rank)
    throw DataQualityError("data matrix is not full row rank (rank " +
                           std::to_string(prep.rank.stacked_rank) + " of " +
                           std::to_string(prep.rank.stacked_rows) + ")");
  prep.spc = fit_spc(prep.D);
  prep.weights = reg_weights(prep.D);
  const Eigen::Index pf = s.plant.p() * s.Nf;
  prep.pred = implicit_predictor(prep.spc, prep.weights, s.weights.Q_bar(s.Nf),
                                 s.weights.lambda_a, Vector::Zero(pf));
  prep.output_power = Vector::Zero(s.plant.p());
  for (const Vector& y : prep.clean.y) prep.output_power += y.cwiseAbs2();
  prep.output_power /= static_cast<double>(prep.clean.y.size());
  return prep;
}

std::vector<ClosedLoopRun> run_closed_loop(const Scenario& s, const PreparedScenario& prep,
                                           std::ostream* sda_trace) {
  Vector sigma;
  if (s.loop_snr_db)
    sigma = (prep.output_power / std::pow(10.0, *s.loop_snr_db / 10.0)).cwiseSqrt();

  std::vector<ClosedLoopRun> runs;
  for (Method method : s.methods) {
    ClosedLoopRun run;
    run.method = method;
    run.Nf = s.Nf;
    Warmup w = warmup(s.plant, s.cs, s.Np, s.loop_seed, sigma);
    std::mt19937_64 noise_rng(s.loop_seed ^ (kNoiseStream << 1));
    DpcController controller(prep.pred, prep.spc, prep.weights, s.weights, s.cs, s.Np, s.Nf);
    XiBuffer buffer = w.buffer;
    Vector x = w.x;
    run.logs.reserve(s.loop_steps);
    for (std::size_t i = 0; i < s.loop_steps; ++i) {
      const long k = s.Np + static_cast<long>(i);
      StepLog log;
      log.k = k;
      log.xi = buffer.xi();
      log.x = x;
      SolveTrace trace;
      const bool tracing = sda_trace && method == Method::SDA;
      auto out = controller.step(buffer, s.reference, k, method, tracing ? &trace : nullptr);
      if (tracing) trace.write_jsonl(*sda_trace, k);
      auto plant_out = step(s.plant, x, out.u_apply);
      add_noise(plant_out.y, sigma, noise_rng);
      log.u_applied = out.u_apply;
      log.y_measured = plant_out.y;
      log.cost = out.solve.cost;
      log.solve = std::move(out.solve);
      log.step_time = out.step_time;
      buffer.push(log.u_applied, log.y_measured);
      x = std::move(plant_out.x_next);
      run.logs.push_back(std::move(log));
    }
    run.hessian_checksum = linalg::checksum(controller.hessian());
    run.factor_checksum = linalg::checksum(controller.factor());
    run.factorizations = controller.factorizations();
    runs.push_back(std::move(run));
  }
  return runs;
}

TimingSummary summarize(std::vector<double> samples) {
  TimingSummary t;
  t.count = samples.size();
  if (samples.empty()) return t;
  std::sort(samples.begin(), samples.end());
  auto quantile = [&samples](double q) {
    const double pos = q * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
  };
  t.min = samples.front();
  t.max = samples.back();
  t.q25 = quantile(0.25);
  t.median = quantile(0.5);
  t.q75 = quantile(0.75);
  const double fence = t.q75 + 1.5 * (t.q75 - t.q25);
  for (double v : samples)
    if (v > fence) t.outliers.push_back(v);
  return t;
}

std::map<Method, TimingSummary> timing_summary(std::span<const StepLog> logs) {
  std::map<Method, std::vector<double>> grouped;
  for (const StepLog& l : logs)
    grouped[l.solve.method].push_back(static_cast<double>(l.step_time.count()));
  std::map<Method, TimingSummary> out;
  for (auto& [method, samples] : grouped) out[method] = summarize(std::move(samples));
  return out;
}

void write_step_csv_header(std::ostream& os, Eigen::Index m, Eigen::Index p) {
  os << "k,method";
  for (Eigen::Index c = 1; c <= m; ++c) os << ",u_" << c;
  for (Eigen::Index c = 1; c <= p; ++c) os << ",y_" << c;
  os << ",cost,nodes,solve_time_ns\n";
}

void write_step_csv_rows(std::ostream& os, std::span<const StepLog> logs) {
  const auto prec = os.precision(17);
  for (const StepLog& l : logs) {
    os << l.k << ',' << to_string(l.solve.method);
    for (Eigen::Index c = 0; c < l.u_applied.size(); ++c) os << ',' << l.u_applied[c];
    for (Eigen::Index c = 0; c < l.y_measured.size(); ++c) os << ',' << l.y_measured[c];
    os << ',' << l.cost << ',' << l.solve.nodes_explored << ',' << l.step_time.count() << '\n';
  }
  os.precision(prec);
}

}  // namespace fcsdpc
