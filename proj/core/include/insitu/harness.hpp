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

#ifndef INSITU_HARNESS_HPP
#define INSITU_HARNESS_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "insitu/estimators.hpp"
#include "insitu/optimizers.hpp"
#include "insitu/problems.hpp"

namespace insitu {

enum class ProblemKind { SingleQubit, Cnot };
enum class TargetKind { Haar, Cnot, Reachable };
enum class OptimizerKind { Acronym, NelderMead, ExSitu };
enum class InitKind { Zero, Uniform };

struct ProblemConfig {
  ProblemKind kind = ProblemKind::SingleQubit;
  /// Piecewise-constant segment count: p for the single qubit, q for the
  /// two-qubit problem (whose control dimension is 4q).
  int segments = 10;
  double omega0 = 1.0;
  double delta1 = 1.0;
  double delta2 = -1.0;
  double coupling = 0.1;
  double dt = 1.0;
  /// Haar draws a fresh random target per trial; Reachable draws random
  /// controls per trial and uses the unitary they implement.
  TargetKind target = TargetKind::Haar;
};

struct EstimatorConfig {
  /// Experiments per fidelity estimate; 0 selects the exact oracle.
  std::int64_t shots = 1000;
  /// Per-component control noise standard deviation; 0 disables the wrapper.
  double control_noise_sigma = 0.0;
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Acronym;
  GainSchedule schedule = GainSchedule::set_b();
  NelderMeadConfig nelder_mead{};
  ExSituConfig ex_situ{};
  /// Spectral norm of the random drift error given to the ex-situ model.
  double model_mismatch_norm = 0.01;
};

struct ExperimentConfig {
  ProblemConfig problem{};
  OptimizerConfig optimizer{};
  EstimatorConfig estimator{};
  StoppingRule stopping{};
  InitKind init = InitKind::Zero;
  int trials = 20;
  std::uint64_t seed = 42;
  /// Cap on recorded iterations per decade (figures are log-log).
  int grid_per_decade = 50;
};

/// Pointwise order statistics of infidelity across trials, on the shared
/// iteration grid. n_tot is the per-point median of cumulative experiments.
struct AggregateSeries {
  std::vector<std::int64_t> iterations;
  std::vector<double> median_infidelity;
  std::vector<double> q25;
  std::vector<double> q75;
  std::vector<double> n_tot;
};

struct PowerLawFit {
  double beta = 0.0;
  double intercept = 0.0;  // natural-log intercept
  double residual_rms = 0.0;
  std::int64_t k_lo = 0;
  std::int64_t k_hi = 0;
  int points = 0;
};

struct SweepRow {
  double shots = 0.0;  // +inf for the exact reference row
  double n_tot = 0.0;
  double median_infidelity = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Log-spaced subsample of {0, 1, ..., k_max}: every integer that rounds from
/// 10^(i / points_per_decade), plus 0 and k_max. Subsampling changes which
/// iterations are reported, never the values recorded at them.
std::vector<std::int64_t> iteration_grid(std::int64_t k_max, int points_per_decade = 50);

/// Deterministic per-purpose stream: (base seed, trial index, tag) -> engine.
std::mt19937_64 derive_stream(std::uint64_t base_seed, std::uint64_t trial,
                              std::uint64_t tag);

/// Instantiates the configured problem, drawing the target (Haar or
/// reachable-controls rule) from `target_rng`.
std::shared_ptr<const ControlProblem> make_problem(const ProblemConfig& config,
                                                   std::mt19937_64& target_rng);

/// Instantiates the configured estimator chain over `problem`.
std::unique_ptr<FidelityEstimator> make_estimator(const EstimatorConfig& config,
                                                  std::shared_ptr<const ControlProblem> problem,
                                                  std::mt19937_64 sample_rng,
                                                  std::mt19937_64 noise_rng);

ControlVector make_init(InitKind kind, int dim, std::mt19937_64& rng);

/// Runs config.trials independent trials, one trace each. Trial i derives all
/// of its random streams from (config.seed, i), so results are independent of
/// worker count and execution order. workers < 1 means available parallelism.
std::vector<OptimizerTrace> run_trials(const ExperimentConfig& config, int workers = 0);

/// Pointwise median and quartiles of infidelity 1 - f across traces.
/// All traces must share one iteration grid.
AggregateSeries aggregate(const std::vector<OptimizerTrace>& traces);

/// Least-squares line through (log k, log median infidelity) for grid points
/// with k in [k_lo, k_hi]. Requires >= 5 points and strictly positive medians.
PowerLawFit fit_exponent(const AggregateSeries& series, std::int64_t k_lo,
                         std::int64_t k_hi);

/// Raises medians (and quartiles) below `floor` up to it so log fits stay
/// finite; returns true when anything was clamped.
bool clamp_infidelity_floor(AggregateSeries& series, double floor = 1e-15);

/// Runs the config once per shot count and reports the k_max median, plus an
/// exact-oracle reference row (shots = inf) appended last.
std::vector<SweepRow> sweep_shots(const ExperimentConfig& config,
                                  const std::vector<std::int64_t>& shot_values,
                                  int workers = 0);

/// Linear-interpolation quantile of an unsorted sample (the convention used
/// throughout the aggregation).
double quantile(std::vector<double> values, double q);

}  // namespace insitu

#endif
