// Copyright 2026 The insitu-control Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  insitu::cli::Overrides overrides;
  int workers = 0;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool with_shots = true) {
  cmd->add_option("--config", args.config_path, "Experiment config file (JSON)");
  cmd->add_option("--seed", args.overrides.seed, "Base seed for all trial streams");
  cmd->add_option("--trials", args.overrides.trials, "Number of independent trials");
  cmd->add_option("--iterations", args.overrides.iterations, "Iteration budget k_max");
  if (with_shots) {
    cmd->add_option("--shots", args.overrides.shots,
                    "Experiments per fidelity estimate (0 = exact oracle)");
  }
  cmd->add_option("--sigma", args.overrides.sigma,
                  "Control noise standard deviation per component");
  cmd->add_option("--schedule", args.overrides.schedule, "Gain schedule preset: A or B")
      ->check(CLI::IsMember({"A", "B"}));
  cmd->add_option("--problem", args.overrides.problem, "Problem: qubit or cnot")
      ->check(CLI::IsMember({"qubit", "cnot"}));
  cmd->add_option("--optimizer", args.overrides.optimizer,
                  "Optimizer: acronym, nm or exsitu")
      ->check(CLI::IsMember({"acronym", "nm", "exsitu"}));
  cmd->add_option("--workers", args.workers,
                  "Worker threads (0 = available parallelism)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"insitu: stochastic in-situ quantum gate control experiments"};
  app.require_subcommand(1);

  // run
  CommonArgs run_args;
  std::string run_out = "series.csv";
  std::optional<std::int64_t> run_fit_lo;
  std::optional<std::int64_t> run_fit_hi;
  auto* run = app.add_subcommand("run", "Run one experiment and write the median series");
  add_common_flags(run, run_args);
  run->add_option("--out", run_out, "Output CSV path");
  run->add_option("--fit-lo", run_fit_lo, "Fit range lower iteration (enables fit output)");
  run->add_option("--fit-hi", run_fit_hi, "Fit range upper iteration");

  // sweep
  CommonArgs sweep_args;
  std::string sweep_out = "sweep.csv";
  std::string sweep_shots;
  auto* sweep =
      app.add_subcommand("sweep", "Sweep shots-per-estimate and report k_max medians");
  add_common_flags(sweep, sweep_args, /*with_shots=*/false);
  sweep->add_option("--shots", sweep_shots, "Comma-separated shot counts, e.g. 100,1000")
      ->required();
  sweep->add_option("--out", sweep_out, "Output CSV path");

  // fit
  std::string fit_in;
  std::string fit_out;
  std::optional<std::int64_t> fit_lo;
  std::optional<std::int64_t> fit_hi;
  auto* fit = app.add_subcommand("fit", "Fit a power-law exponent to a series CSV");
  fit->add_option("--in", fit_in, "Series CSV produced by run/compare")->required();
  fit->add_option("--k-lo", fit_lo, "Fit range lower iteration");
  fit->add_option("--k-hi", fit_hi, "Fit range upper iteration");
  fit->add_option("--out", fit_out, "Also write the fit JSON to this path");

  // compare
  CommonArgs compare_args;
  std::string compare_out = "compare";
  std::optional<std::int64_t> compare_fit_lo;
  std::optional<std::int64_t> compare_fit_hi;
  auto* compare = app.add_subcommand(
      "compare", "Run acronym and nm under one config and emit paired series");
  add_common_flags(compare, compare_args);
  compare->add_option("--out", compare_out, "Output stem (writes <stem>_{acronym,nm}.csv)");
  compare->add_option("--fit-lo", compare_fit_lo, "Fit range lower iteration");
  compare->add_option("--fit-hi", compare_fit_hi, "Fit range upper iteration");

  CLI11_PARSE(app, argc, argv);

  auto make_fit_range = [](const std::optional<std::int64_t>& lo,
                           const std::optional<std::int64_t>& hi)
      -> std::optional<insitu::cli::FitRange> {
    if (!lo.has_value() && !hi.has_value()) {
      return std::nullopt;
    }
    insitu::cli::FitRange range;
    range.k_lo = lo.value_or(0);
    range.k_hi = hi.value_or(0);
    return range;
  };

  // sweep's --shots override does not apply (the list drives the runs).
  if (run->parsed()) {
    return insitu::cli::cmd_run(run_args.config_path, run_args.overrides,
                                make_fit_range(run_fit_lo, run_fit_hi), run_out,
                                run_args.workers, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    const auto shots = insitu::cli::parse_shot_list(sweep_shots, std::cerr);
    if (!shots.has_value()) {
      return 2;
    }
    if (shots->empty()) {
      std::cerr << "error: sweep requires a nonempty --shots list\n";
      return 2;
    }
    return insitu::cli::cmd_sweep(sweep_args.config_path, sweep_args.overrides, *shots,
                                  sweep_out, sweep_args.workers, std::cout, std::cerr);
  }
  if (fit->parsed()) {
    return insitu::cli::cmd_fit(fit_in, fit_lo, fit_hi, fit_out, std::cout, std::cerr);
  }
  if (compare->parsed()) {
    return insitu::cli::cmd_compare(compare_args.config_path, compare_args.overrides,
                                    make_fit_range(compare_fit_lo, compare_fit_hi),
                                    compare_out, compare_args.workers, std::cout,
                                    std::cerr);
  }
  return 2;
}
