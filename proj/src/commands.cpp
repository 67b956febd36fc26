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

#include "fcsdpc/commands.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fcsdpc/export.hpp"

namespace fcsdpc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void apply(ExperimentConfig& cfg, const Overrides& o) {
  if (o.out) cfg.output_directory = *o.out;
  if (o.method) cfg.methods = {*o.method};
  if (o.Nf) cfg.Nf = {*o.Nf};
  if (o.seed) {
    cfg.data_seed = *o.seed;
    cfg.loop_seed = *o.seed + 1;
  }
  if (o.trace) cfg.trace = true;
  cfg.validate();
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

fs::path output_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.output_directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::vector<int> sweep(const ExperimentConfig& cfg) {
  std::vector<int> nf = cfg.Nf;
  std::sort(nf.begin(), nf.end());
  nf.erase(std::unique(nf.begin(), nf.end()), nf.end());
  return nf;
}

/// Maps library errors onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataQualityError& e) {
    err << "data quality failure: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    err << "data quality failure: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

int cmd_collect(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const std::vector<int> nf = sweep(cfg);
    const Scenario s = cfg.scenario(nf.back());
    const Trajectory clean =
        collect_persistent(s.plant, s.cs, CollectionPlan{s.Np, nf.back(), s.collect_steps},
                           s.data_seed, Vector::Zero(s.plant.n()));
    const Trajectory data = add_output_noise(clean, NoiseSpec{s.snr_db, data_noise_seed(s.data_seed)});

    const fs::path dir = output_dir(cfg);
    {
      std::ofstream os = open_out(dir / "trajectory.csv");
      write_trajectory_csv(os, data);
    }
    json reports = json::array();
    bool usable = true;
    for (int h : nf) {
      const DataMatrix D = build_hankel(data, s.Np, h);
      DataQuality q;
      q.rank = check_rank(D, s.plant.n());
      q.persistency_order = s.Np + h + 1 + static_cast<int>(s.plant.n());
      q.persistent = check_persistency(data.u, q.persistency_order);
      q.noise_free = !cfg.snr_db.has_value();
      usable = usable && q.usable();
      reports.push_back(data_quality_to_json(q, D, s.plant.n()));
    }
    const json doc = {{"steps", data.size()}, {"satisfied", usable}, {"partitions", reports}};
    {
      std::ofstream os = open_out(dir / "rank_report.json");
      os << doc.dump(2) << '\n';
    }
    log << "collected " << data.size() << " steps into " << (dir / "trajectory.csv").string()
        << "; data " << (usable ? "usable" : "NOT usable") << '\n';
    if (!usable) {
      err << "data quality failure: see " << (dir / "rank_report.json").string() << '\n'
          << doc.dump(2) << '\n';
      return int(kDataError);
    }
    return int(kOk);
  });
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const std::vector<int> nf = sweep(cfg);
    const fs::path dir = output_dir(cfg);
    const auto count = static_cast<int>(nf.size());
    std::vector<std::vector<ClosedLoopRun>> results(nf.size());
    std::vector<std::exception_ptr> errors(nf.size());

    // each worker owns one scenario end to end
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      try {
        const int h = nf[static_cast<std::size_t>(i)];
        const Scenario s = cfg.scenario(h);
        const PreparedScenario prep = prepare(s);
        {
          std::ofstream os = open_out(dir / ("predictor_nf" + std::to_string(h) + ".json"));
          os << predictor_to_json(prep.spc, prep.pred, prep.weights, s.weights, s.Np, h).dump(2)
             << '\n';
        }
        std::ofstream trace;
        if (cfg.trace) trace = open_out(dir / ("trace_nf" + std::to_string(h) + ".jsonl"));
        results[static_cast<std::size_t>(i)] =
            run_closed_loop(s, prep, cfg.trace ? &trace : nullptr);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    TimingTable table;
    for (std::size_t i = 0; i < nf.size(); ++i) {
      std::ofstream os = open_out(dir / ("steps_nf" + std::to_string(nf[i]) + ".csv"));
      write_step_csv_header(os, cfg.plant.m(), cfg.plant.p());
      for (const ClosedLoopRun& run : results[i]) {
        write_step_csv_rows(os, run.logs);
        table[{run.method, run.Nf}] = timing_entry(run.logs);
      }
    }
    {
      std::ofstream os = open_out(dir / "timing.json");
      os << timing_to_json(table).dump(2) << '\n';
    }
    for (const auto& [key, e] : table)
      log << to_string(key.first) << " N_f=" << key.second << ": median " << e.time.median
          << " ns, mean nodes " << e.mean_nodes << '\n';
    return int(kOk);
  });
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err,
               const verify::SuiteOptions& opt) {
  return guarded(err, [&] {
    cfg.validate();
    const auto results = verify::run_suite(cfg, opt);
    verify::print_table(log, results);
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    return int(ok ? kOk : kPropertyFailure);
  });
}

}  // namespace fcsdpc::cli
