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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fcsdpc/commands.hpp"

int main(int argc, char** argv) {
  using namespace fcsdpc;

  CLI::App app{"Finite-control-set data-driven predictive control experiments"};
  app.require_subcommand(1);

  std::string config_path = "configs/default.json";
  cli::Overrides o;
  std::optional<std::string> method;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--method", method, "restrict to one solver")
        ->check(CLI::IsMember({"sda", "enum", "SDA", "ENUM"}));
    sub->add_option("--nf", o.Nf, "single prediction horizon")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "data seed (loop seed = seed + 1)");
    sub->add_flag("--trace", o.trace, "write sphere-decoding node logs");
  };
  CLI::App* collect = app.add_subcommand("collect", "record excitation data and check its rank");
  CLI::App* run = app.add_subcommand("run", "closed-loop runs per method and horizon");
  CLI::App* verify = app.add_subcommand("verify", "run the property suite");
  for (CLI::App* sub : {collect, run, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  ExperimentConfig cfg;
  try {
    if (method) o.method = method_from_string(*method);
    cfg = load_config(config_path);
    cli::apply(cfg, o);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  }

  if (collect->parsed()) return cli::cmd_collect(cfg, std::cout, std::cerr);
  if (run->parsed()) return cli::cmd_run(cfg, std::cout, std::cerr);
  return cli::cmd_verify(cfg, std::cout, std::cerr);
}
