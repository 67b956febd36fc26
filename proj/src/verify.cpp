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

#include "fcsdpc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <limits>
#include <optional>
#include <sstream>

#include "fcsdpc/linalg.hpp"
#include "fcsdpc/random.hpp"

namespace fcsdpc::verify {

namespace {

using random::Rng;
using Clock = std::chrono::steady_clock;

const std::vector<double> kLevels{-1.0, 0.0, 1.0};

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  return std::exp(d(rng));
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

template <typename Body>
CheckResult timed(int id, std::string name, Body&& body,
                  double limit_s = std::numeric_limits<double>::infinity()) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.seconds > limit_s) {
    r.passed = false;
    r.detail += "; exceeded time limit of " + std::to_string(static_cast<int>(limit_s)) + " s";
  }
  return r;
}

struct Dataset {
  PlantModel plant;
  ControlSet cs;
  DataMatrix D;
  SpcPredictor spc;
  RegWeights w;
};

/// Random stable plant, excited with a ternary alphabet, noisy outputs,
/// and at least twice as many Hankel columns as rows.
Dataset noisy_dataset(Rng& rng, int Np, int Nf, Eigen::Index inputs = 0) {
  for (;;) {
    const Eigen::Index n = uniform_int(rng, 2, 4), p = uniform_int(rng, 1, 2);
    const Eigen::Index m = inputs > 0 ? inputs : uniform_int(rng, 1, 2);
    PlantModel plant = random::stable_plant(rng, n, m, p, 0.9);
    ControlSet cs(kLevels, m);
    const Eigen::Index rows = (m + p) * (Np + Nf);
    const auto steps = static_cast<std::size_t>(2 * rows + 20 + Np + Nf);
    Trajectory clean = collect_excitation(plant, cs, steps, rng(), Vector::Zero(n));
    Trajectory data = add_output_noise(clean, NoiseSpec{log_uniform(rng, 20.0, 40.0), rng()});
    DataMatrix D = build_hankel(data, Np, Nf);
    if (!check_rank(D, n).full_row_rank) continue;
    SpcPredictor spc = fit_spc(D);
    RegWeights w = reg_weights(D);
    return {std::move(plant), std::move(cs), std::move(D), std::move(spc), std::move(w)};
  }
}

IlsProblem random_ils(Rng& rng, Eigen::Index m, int Nf, bool bounded) {
  const Eigen::Index N = m * Nf;
  ControlSet cs = bounded ? ControlSet(kLevels, m, 1.0) : ControlSet(kLevels, m);
  const Matrix L = lower_factor(random::spd(rng, N, log_uniform(rng, 1.0, 1e4)));
  std::uniform_real_distribution<double> spread(-1.6, 1.6);
  Vector u_cont(N);
  for (Eigen::Index i = 0; i < N; ++i) u_cont[i] = spread(rng);
  Vector u_prev(m);
  for (Eigen::Index c = 0; c < m; ++c) u_prev[c] = kLevels[static_cast<std::size_t>(uniform_int(rng, 0, 2))];
  return {L, L * u_cont, std::move(cs), std::move(u_prev), Nf, m};
}

/// Every feasible stacked sequence, in lexicographic label order.
std::vector<Vector> feasible_sequences(const ControlSet& cs, const Vector& u_prev, int Nf) {
  const Eigen::Index m = cs.channels(), N = m * Nf;
  std::vector<Vector> out;
  std::vector<int> idx(static_cast<std::size_t>(N), 0);
  for (;;) {
    Vector u(N);
    for (Eigen::Index i = 0; i < N; ++i) u[i] = cs.level(i % m, idx[static_cast<std::size_t>(i)]);
    if (is_feasible(u, cs, u_prev)) out.push_back(u);
    Eigen::Index pos = N - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == cs.level_count(pos % m))
      idx[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return out;
}

double weighted(const Vector& v, const Matrix& W) { return v.dot(W * v); }

}  // namespace

CheckResult decoder_matches_enumeration(std::uint64_t seed, int instances) {
  return timed(1, "sphere decoding matches enumeration", [&](CheckResult& r) {
    Rng rng(seed);
    int mismatches = 0;
    std::uint64_t sda_nodes = 0, enum_leaves = 0;
    for (int i = 0; i < instances; ++i) {
      const Eigen::Index m = uniform_int(rng, 1, 3);
      const int Nf = uniform_int(rng, 1, 4);
      const IlsProblem prob = random_ils(rng, m, Nf, i % 2 == 0);
      const SolveResult a = sphere_decode(prob);
      const SolveResult b = enumerate(prob);
      if (!detail::same(a.u_opt, b.u_opt) || a.cost != b.cost) ++mismatches;
      sda_nodes += a.nodes_explored;
      enum_leaves += b.nodes_explored;
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(instances) + " instances, " + std::to_string(mismatches) +
               " mismatches; nodes " + std::to_string(sda_nodes) + " (SDA) vs " +
               std::to_string(enum_leaves) + " feasible leaves";
  }, 60.0);
}

CheckResult implicit_predictor_matches_inner_minimum(std::uint64_t seed, int datasets,
                                                     const PredictorTamper& tamper) {
  return timed(2, "implicit predictor equals inner minimizer", [&](CheckResult& r) {
    Rng rng(seed);
    double worst = 0.0;
    int failures = 0;
    for (int i = 0; i < datasets; ++i) {
      const int Np = uniform_int(rng, 2, 4), Nf = uniform_int(rng, 1, 3);
      Dataset ds = noisy_dataset(rng, Np, Nf);
      const Eigen::Index m = ds.plant.m(), p = ds.plant.p();
      const Matrix Q_bar = block_diagonal(random::spd(rng, p, 10.0), Nf);
      const double lambda = log_uniform(rng, 1e-1, 1e3);
      const Vector y_ref = random::gaussian(rng, p * Nf);
      ImplicitPredictor pred = implicit_predictor(ds.spc, ds.w, Q_bar, lambda, y_ref);
      if (tamper) tamper(pred);
      const Vector xi = random::gaussian(rng, (m + p) * Np);
      const Vector u_f = random::gaussian(rng, m * Nf);
      const Vector y_dpc = pred.predict(xi, u_f);
      for (RegularizerKind kind : {RegularizerKind::Projection, RegularizerKind::TwoNorm}) {
        const InnerSolution inner = inner_minimizer_oracle(ds.D, kind, lambda, Q_bar, y_ref, xi, u_f);
        const double err = (inner.y_f - y_dpc).lpNorm<Eigen::Infinity>() /
                           (1.0 + y_dpc.lpNorm<Eigen::Infinity>());
        worst = std::max(worst, err);
        if (!(err <= 1e-6)) ++failures;
      }
    }
    r.passed = failures == 0;
    r.detail = std::to_string(datasets) + " datasets x 2 regularizers, worst scaled error " +
               sci(worst) + " (limit 1e-6), " + std::to_string(failures) + " failures";
  });
}

CheckResult regularizer_closed_form(std::uint64_t seed, int triples) {
  return timed(3, "closed-form regularizer minimum", [&](CheckResult& r) {
    Rng rng(seed);
    double worst = 0.0;
    int failures = 0, count = 0;
    for (RegularizerKind kind : {RegularizerKind::Projection, RegularizerKind::TwoNorm}) {
      std::optional<Dataset> ds;
      for (int i = 0; i < triples; ++i) {
        if (i % 10 == 0) ds = noisy_dataset(rng, uniform_int(rng, 2, 4), uniform_int(rng, 1, 3));
        const Eigen::Index m = ds->D.m, p = ds->D.p;
        const int Np = ds->D.Np, Nf = ds->D.Nf;
        const double lambda = log_uniform(rng, 1e-1, 1e3);
        const Vector xi = random::gaussian(rng, (m + p) * Np);
        const Vector u_f = random::gaussian(rng, m * Nf);
        const Vector y_f = ds->spc.predict(xi, u_f) + 0.3 * random::gaussian(rng, p * Nf);
        const double closed = h_star(ds->w, kind, lambda, xi, u_f, y_f, ds->spc);
        const double direct = h_star_oracle(ds->D, kind, lambda, xi, u_f, y_f);
        const double err = std::abs(closed - direct) / std::max(std::abs(direct), 1e-300);
        worst = std::max(worst, err);
        if (!(err <= 1e-6)) ++failures;
        ++count;
      }
    }
    r.passed = failures == 0;
    r.detail = std::to_string(count) + " triples, worst relative error " + sci(worst) +
               " (limit 1e-6), " + std::to_string(failures) + " failures";
  });
}

CheckResult reduced_problem_same_argmin(std::uint64_t seed, int instances) {
  return timed(4, "reduced problem keeps the argmin", [&](CheckResult& r) {
    Rng rng(seed);
    int mismatches = 0, ties = 0;
    constexpr int Nf = 2;
    for (int i = 0; i < instances; ++i) {
      const Dataset ds = noisy_dataset(rng, uniform_int(rng, 2, 3), Nf, 2);
      const Eigen::Index m = 2, p = ds.plant.p();
      WeightConfig wc{random::spd(rng, p, 10.0), random::spd(rng, m, 10.0) * 0.1,
                      log_uniform(rng, 1e-1, 1e3),
                      i % 2 == 0 ? RegularizerKind::Projection : RegularizerKind::TwoNorm};
      const Matrix Q_bar = wc.Q_bar(Nf), R_bar = wc.R_bar(Nf);
      const Vector y_ref = random::gaussian(rng, p * Nf);
      const Vector xi = ds.D.Wp().col(uniform_int(rng, 0, static_cast<int>(ds.D.columns()) - 1));
      Vector u_prev(m);
      for (Eigen::Index c = 0; c < m; ++c) u_prev[c] = kLevels[static_cast<std::size_t>(uniform_int(rng, 0, 2))];
      ControlSet cs(kLevels, m, 1.0);

      const ImplicitPredictor pred = implicit_predictor(ds.spc, ds.w, Q_bar, wc.lambda_a, y_ref);
      const CondensedProblem cp = condense_dpc(pred, ds.spc, ds.w, wc, xi, u_prev, y_ref);
      const SolveResult sol =
          sphere_decode(IlsProblem{cp.L_factor, cp.u_unc_t, cs, u_prev, Nf, m});

      const DiffOperators ops = diff_operators(m, Nf);
      auto original = [&](const Vector& u) {
        const InnerSolution inner =
            inner_minimizer_oracle(ds.D, wc.kind, wc.lambda_a, Q_bar, y_ref, xi, u);
        const Vector du = ops.I_op * u - ops.L_op * u_prev;
        return weighted(inner.y_f - y_ref, Q_bar) +
               h_star_oracle(ds.D, wc.kind, wc.lambda_a, xi, u, inner.y_f) + weighted(du, R_bar);
      };
      double best = std::numeric_limits<double>::infinity();
      Vector best_u;
      for (const Vector& u : feasible_sequences(cs, u_prev, Nf)) {
        const double v = original(u);
        if (v < best) {
          best = v;
          best_u = u;
        }
      }
      if (detail::same(best_u, sol.u_opt)) continue;
      if (original(sol.u_opt) <= best + 1e-9 * (1.0 + std::abs(best)))
        ++ties;
      else
        ++mismatches;
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(instances) + " instances (m=2, N_f=2), " +
               std::to_string(mismatches) + " mismatches, " + std::to_string(ties) +
               " equal-cost ties";
  });
}

CheckResult spc_exact_on_noise_free_data(std::uint64_t seed, int draws) {
  return timed(5, "SPC is exact on noise-free data", [&](CheckResult& r) {
    Rng rng(seed);
    constexpr Eigen::Index n = 4, m = 2, p = 1;
    constexpr int Np = 4, Nf = 3;
    const PlantModel plant = random::stable_plant(rng, n, m, p, 0.9);
    const ControlSet cs(kLevels, m);
    const Trajectory traj = collect_excitation(plant, cs, 200, rng(), Vector::Zero(n));
    const DataMatrix D = build_hankel(traj, Np, Nf);
    const RankReport rank = check_rank(D, n);
    const SpcPredictor spc = fit_spc(D);
    const MultiStep ms = multistep(plant, Nf);

    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
      Vector x = random::gaussian(rng, n);
      Vector xi((m + p) * Np);
      for (int k = 0; k < Np; ++k) {
        const Vector u = random::gaussian(rng, m);
        const StepOutput out = step(plant, x, u);
        xi.segment(m * k, m) = u;
        xi.segment(m * Np + p * k, p) = out.y;
        x = out.x_next;
      }
      const Vector u_f = random::gaussian(rng, m * Nf);
      const Vector y_model = ms.O * x + ms.T * u_f;
      const double err = (spc.predict(xi, u_f) - y_model).lpNorm<Eigen::Infinity>() /
                         std::max(1.0, y_model.lpNorm<Eigen::Infinity>());
      worst = std::max(worst, err);
    }
    r.passed = rank.satisfied && worst <= 1e-8;
    r.detail = "rank " + std::to_string(rank.numerical_rank) + "/" + std::to_string(rank.target) +
               ", worst error " + sci(worst) + " over " + std::to_string(draws) +
               " draws (limit 1e-8)";
  });
}

CheckResult condensation_offset_constant(std::uint64_t seed, int params, int samples) {
  return timed(6, "condensed cost differs by a constant", [&](CheckResult& r) {
    Rng rng(seed);
    double worst_mpc = 0.0, worst_dpc = 0.0;
    auto spread = [](const std::vector<double>& offsets, double scale) {
      const auto [lo, hi] = std::minmax_element(offsets.begin(), offsets.end());
      return (*hi - *lo) / std::max(1.0, scale);
    };
    for (int i = 0; i < params; ++i) {
      // model-based condensing
      {
        const Eigen::Index n = uniform_int(rng, 2, 5), m = uniform_int(rng, 1, 3),
                           p = uniform_int(rng, 1, 3);
        const int Nf = uniform_int(rng, 1, 5);
        const PlantModel plant = random::stable_plant(rng, n, m, p, 0.95);
        const MultiStep ms = multistep(plant, Nf);
        const Matrix Qh = random::gaussian(rng, p, p);
        WeightConfig wc{Qh * Qh.transpose(), random::spd(rng, m, 10.0), 1.0,
                        RegularizerKind::Projection};
        const Vector x0 = random::gaussian(rng, n), u_prev = random::gaussian(rng, m);
        const Vector y_ref = random::gaussian(rng, p * Nf);
        const CondensedProblem cp = condense_mpc(ms.O, ms.T, wc, x0, u_prev, y_ref);
        std::vector<double> offsets;
        double scale = 0.0;
        for (int s = 0; s < samples; ++s) {
          const Vector u = random::gaussian(rng, m * Nf);
          double direct = 0.0;
          Vector x = x0, last = u_prev;
          for (int k = 0; k < Nf; ++k) {
            const Vector uk = u.segment(m * k, m);
            x = plant.A() * x + plant.B() * uk;
            direct += weighted(plant.C() * x - y_ref.segment(p * k, p), wc.Q) +
                      weighted(uk - last, wc.R);
            last = uk;
          }
          offsets.push_back(direct - (0.5 * u.dot(cp.H * u) + cp.f.dot(u)));
          scale = std::max(scale, std::abs(direct));
        }
        worst_mpc = std::max(worst_mpc, spread(offsets, scale));
      }
      // implicit-predictor condensing, both regularizers
      for (RegularizerKind kind : {RegularizerKind::Projection, RegularizerKind::TwoNorm}) {
        const int Nf = uniform_int(rng, 1, 3);
        Dataset ds = noisy_dataset(rng, uniform_int(rng, 2, 4), Nf);
        const Eigen::Index m = ds.plant.m(), p = ds.plant.p();
        WeightConfig wc{random::spd(rng, p, 10.0), random::spd(rng, m, 10.0) * 0.1,
                        log_uniform(rng, 1e-1, 1e3), kind};
        const Vector y_ref = random::gaussian(rng, p * Nf);
        const Vector xi = random::gaussian(rng, (m + p) * ds.D.Np);
        const Vector u_prev = random::gaussian(rng, m);
        const ImplicitPredictor pred =
            implicit_predictor(ds.spc, ds.w, wc.Q_bar(Nf), wc.lambda_a, y_ref);
        const CondensedProblem cp = condense_dpc(pred, ds.spc, ds.w, wc, xi, u_prev, y_ref);
        const DiffOperators ops = diff_operators(m, Nf);
        std::vector<double> offsets;
        double scale = 0.0;
        for (int s = 0; s < samples; ++s) {
          const Vector u = random::gaussian(rng, m * Nf);
          const Vector y = pred.predict(xi, u);
          const double direct = weighted(y - y_ref, wc.Q_bar(Nf)) +
                                weighted(ops.I_op * u - ops.L_op * u_prev, wc.R_bar(Nf)) +
                                h_star_oracle(ds.D, kind, wc.lambda_a, xi, u, y);
          offsets.push_back(direct - (0.5 * u.dot(cp.H * u) + cp.f.dot(u)));
          scale = std::max(scale, std::abs(direct));
        }
        worst_dpc = std::max(worst_dpc, spread(offsets, scale));
      }
    }
    r.passed = worst_mpc <= 1e-7 && worst_dpc <= 1e-7;
    r.detail = std::to_string(params) + " parameterizations each, worst relative spread " +
               sci(worst_mpc) + " (model) / " + sci(worst_dpc) + " (data) (limit 1e-7)";
  });
}

CheckResult factor_reconstructs_hessian(std::uint64_t seed, int matrices) {
  return timed(7, "lower factor reconstructs the Hessian", [&](CheckResult& r) {
    Rng rng(seed);
    double worst = 0.0;
    bool triangular = true;
    for (int i = 0; i < matrices; ++i) {
      const Eigen::Index n = uniform_int(rng, 1, 12);
      const Matrix H = random::spd(rng, n, log_uniform(rng, 1.0, 1e6));
      const Matrix L = lower_factor(H);
      const double err = (L.transpose() * L - H).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      for (Eigen::Index a = 0; a < n; ++a) {
        if (!(L(a, a) > 0.0)) triangular = false;
        for (Eigen::Index b = a + 1; b < n; ++b)
          if (L(a, b) != 0.0) triangular = false;
      }
    }
    r.passed = triangular && worst <= 1e-10;
    r.detail = std::to_string(matrices) + " SPD matrices up to 12x12, worst relative residual " +
               sci(worst) + " (limit 1e-10)" + (triangular ? "" : ", factor not lower triangular");
  });
}

CheckResult closed_loop_methods_agree(const Scenario& base) {
  return timed(8, "closed loop: SDA and ENUM agree, SDA faster", [&](CheckResult& r) {
    Scenario s = base;
    s.Nf = 2;
    s.methods = {Method::SDA, Method::ENUM};
    const PreparedScenario prep = prepare(s);
    const auto runs = run_closed_loop(s, prep);
    const auto& a = runs[0].logs;
    const auto& b = runs[1].logs;
    bool identical = a.size() == b.size();
    for (std::size_t k = 0; identical && k < a.size(); ++k)
      identical = detail::same(a[k].u_applied, b[k].u_applied) &&
                  detail::same(a[k].y_measured, b[k].y_measured);
    auto median_ns = [](const std::vector<StepLog>& logs) {
      std::vector<double> t;
      for (const StepLog& l : logs) t.push_back(static_cast<double>(l.step_time.count()));
      return summarize(std::move(t)).median;
    };
    auto mean_nodes = [](const std::vector<StepLog>& logs) {
      double n = 0.0;
      for (const StepLog& l : logs) n += static_cast<double>(l.solve.nodes_explored);
      return logs.empty() ? 0.0 : n / static_cast<double>(logs.size());
    };
    const double t_sda = median_ns(a), t_enum = median_ns(b);
    const double n_sda = mean_nodes(a), n_enum = mean_nodes(b);
    r.passed = identical && t_sda < t_enum && n_sda < n_enum;
    std::ostringstream os;
    os << s.loop_steps << " steps, sequences " << (identical ? "identical" : "DIFFER")
       << ", median step " << std::fixed << std::setprecision(0) << t_sda << " ns (SDA) vs "
       << t_enum << " ns (ENUM), mean nodes " << std::setprecision(1) << n_sda << " vs "
       << n_enum;
    r.detail = os.str();
  }, 300.0);
}

CheckResult noise_hits_target_snr(const ExperimentConfig& cfg, std::size_t samples) {
  return timed(9, "measurement noise matches target SNR", [&](CheckResult& r) {
    const double target = cfg.snr_db.value_or(40.0);
    const Trajectory clean = collect_excitation(cfg.plant, cfg.control_set, samples, cfg.data_seed,
                                                Vector::Zero(cfg.plant.n()));
    const Trajectory noisy = add_output_noise(clean, NoiseSpec{target, cfg.data_seed + 1});
    const Eigen::Index p = cfg.plant.p();
    Vector signal = Vector::Zero(p), noise = Vector::Zero(p);
    for (std::size_t k = 0; k < clean.size(); ++k) {
      signal += clean.y[k].cwiseAbs2();
      noise += (noisy.y[k] - clean.y[k]).cwiseAbs2();
    }
    std::ostringstream os;
    os << samples << " samples, target " << target << " dB, measured";
    bool ok = true;
    for (Eigen::Index c = 0; c < p; ++c) {
      const double snr = 10.0 * std::log10(signal[c] / noise[c]);
      os << ' ' << std::fixed << std::setprecision(3) << snr;
      ok = ok && std::abs(snr - target) <= 0.5;
    }
    r.passed = ok;
    r.detail = os.str() + " dB (limit +-0.5 dB)";
  });
}

CheckResult hessian_cached(const Scenario& base) {
  return timed(10, "Hessian and factor stay cached", [&](CheckResult& r) {
    Scenario s = base;
    s.methods = {Method::SDA};
    const PreparedScenario prep = prepare(s);
    const Vector amp = 0.5 * prep.output_power.cwiseSqrt();
    s.reference = ReferenceSignal::sine(amp, 100.0, Vector::Zero(s.plant.p()));

    Warmup w = warmup(s.plant, s.cs, s.Np, s.loop_seed);
    DpcController controller(prep.pred, prep.spc, prep.weights, s.weights, s.cs, s.Np, s.Nf);
    const std::uint64_t h0 = linalg::checksum(controller.hessian());
    const std::uint64_t l0 = linalg::checksum(controller.factor());
    XiBuffer buffer = w.buffer;
    Vector x = w.x;
    int changed = 0, fresh_mismatch = 0;
    std::size_t distinct_refs = 0;
    Vector last_ref;
    for (std::size_t i = 0; i < s.loop_steps; ++i) {
      const long k = s.Np + static_cast<long>(i);
      const auto out = controller.step(buffer, s.reference, k, Method::SDA);
      if (linalg::checksum(controller.hessian()) != h0 ||
          linalg::checksum(controller.factor()) != l0)
        ++changed;
      const Vector y_ref = s.reference.window(k, s.Nf);
      if (!detail::same(y_ref, last_ref)) ++distinct_refs;
      last_ref = y_ref;
      const ImplicitPredictor fresh = implicit_predictor(prep.spc, prep.weights,
                                                         s.weights.Q_bar(s.Nf),
                                                         s.weights.lambda_a, y_ref);
      const DpcCondenser rebuilt(fresh, prep.spc, prep.weights, s.weights);
      if (linalg::checksum(rebuilt.hessian()) != h0 || linalg::checksum(rebuilt.factor()) != l0)
        ++fresh_mismatch;
      auto next = step(s.plant, x, out.u_apply);
      buffer.push(out.u_apply, next.y);
      x = std::move(next.x_next);
    }
    r.passed = changed == 0 && fresh_mismatch == 0 && controller.factorizations() == 1;
    r.detail = std::to_string(s.loop_steps) + " steps, " + std::to_string(distinct_refs) +
               " reference windows, " + std::to_string(controller.factorizations()) +
               " factorization(s), " + std::to_string(changed) + " cached / " +
               std::to_string(fresh_mismatch) + " recomputed checksum changes";
  });
}

std::vector<CheckResult> run_suite(const ExperimentConfig& cfg, const SuiteOptions& opt) {
  Scenario s = cfg.scenario(2);
  s.loop_steps = 800;
  std::vector<CheckResult> out;
  out.push_back(decoder_matches_enumeration(opt.seed));
  out.push_back(implicit_predictor_matches_inner_minimum(opt.seed + 1, 50, opt.tamper));
  out.push_back(regularizer_closed_form(opt.seed + 2));
  out.push_back(reduced_problem_same_argmin(opt.seed + 3));
  out.push_back(spc_exact_on_noise_free_data(opt.seed + 4));
  out.push_back(condensation_offset_constant(opt.seed + 5));
  out.push_back(factor_reconstructs_hessian(opt.seed + 6));
  out.push_back(closed_loop_methods_agree(s));
  out.push_back(noise_hits_target_snr(cfg));
  out.push_back(hessian_cached(s));
  return out;
}

void print_table(std::ostream& os, std::span<const CheckResult> results) {
  std::size_t width = 4;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    os << std::setw(2) << r.id << "  " << (r.passed ? "PASS" : "FAIL") << "  " << std::left
       << std::setw(static_cast<int>(width)) << r.name << std::right << "  " << std::fixed
       << std::setprecision(2) << std::setw(7) << r.seconds << " s  " << r.detail << '\n';
  }
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
  os << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
}

}  // namespace fcsdpc::verify
