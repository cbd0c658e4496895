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

#ifndef INSITU_OPTIMIZERS_HPP
#define INSITU_OPTIMIZERS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "insitu/estimators.hpp"
#include "insitu/problems.hpp"

namespace insitu {

/// Decaying gain sequences alpha_k = a/(k+1)^s (step size) and
/// beta_k = b/(k+1)^t (perturbation size).
struct GainSchedule {
  double a = 1.0;
  double b = 1.0;
  double s = 1.0;
  double t = 1.0 / 6.0;

  /// The widely used general-purpose exponents s = 0.602, t = 0.101.
  static GainSchedule set_a() { return {1.0, 1.0, 0.602, 0.101}; }
  /// The asymptotically optimal exponents s = 1, t = 1/6 (the default).
  static GainSchedule set_b() { return {1.0, 1.0, 1.0, 1.0 / 6.0}; }

  /// Returns (alpha_k, beta_k) for iteration index k >= 0.
  std::pair<double, double> gains(std::int64_t k) const;
};

struct SpsaState {
  ControlVector controls;
  std::int64_t iteration = 0;
  std::mt19937_64 rng;
};

/// Stop when the iterate moves by no more than `epsilon` (when set), or when
/// the iteration budget is exhausted, whichever comes first.
struct StoppingRule {
  std::optional<double> epsilon;
  std::int64_t max_iterations = 10000;
};

enum class StopReason { ToleranceReached, BudgetExhausted };

/// One per-iteration record. `experiments` is shots x calls (+inf when the
/// estimator is exact, NaN for model-based optimizers that consume none).
struct TracePoint {
  std::int64_t iteration = 0;
  std::int64_t calls = 0;
  double experiments = 0.0;
  double fidelity = 0.0;
  ControlVector controls;
};

/// Per-run record. Points are logged on the caller's iteration grid; the
/// fidelity column is the true (noiseless) objective of the iterate, computed
/// by a separate exact oracle that never touches the estimator counters.
struct OptimizerTrace {
  std::vector<TracePoint> points;
  /// Model-objective values parallel to `points`; filled by ex_situ_gradient.
  std::vector<double> model_fidelity;
  StopReason stop_reason = StopReason::BudgetExhausted;
  std::int64_t iterations = 0;
  std::int64_t total_calls = 0;
  double mean_calls_per_iteration = 0.0;
  std::string optimizer;
};

/// Simultaneous-perturbation gradient estimate along a fixed +-1 direction:
/// [f(c + beta d) - f(c - beta d)] / (2 beta) * d. Consumes exactly two
/// estimator calls.
ControlVector spsa_gradient(FidelityEstimator& estimator, const ControlVector& controls,
                            double beta, const ControlVector& direction);

/// One ascent step: draws a fair-coin +-1 direction from the state's stream,
/// estimates the gradient (two calls), and applies c += alpha_k g.
SpsaState spsa_iteration(SpsaState state, FidelityEstimator& estimator,
                         const GainSchedule& schedule);

/// Full SPSA run. `grid` lists the iteration indices to record (sorted
/// ascending; 0 records the initial point); an empty grid records every
/// iteration.
OptimizerTrace run_spsa(const ControlProblem& problem, FidelityEstimator& estimator,
                        const GainSchedule& schedule, ControlVector init,
                        const StoppingRule& stop, std::mt19937_64 rng,
                        std::span<const std::int64_t> grid = {});

/// Standard downhill-simplex coefficients plus the initial-simplex rule:
/// vertex i displaces coordinate i of the start point by 5% of its value, or
/// by 0.00025 when that coordinate is zero.
struct NelderMeadConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double nonzero_delta = 0.05;
  double zero_delta = 0.00025;
  /// A simplex whose vertices all lie within this distance of the best vertex
  /// is considered degenerate and triggers a restart from the best vertex.
  double degenerate_size = 1e-12;
};

/// Nelder-Mead ascent on the estimated fidelity (run as descent on 1 - f).
/// Every estimator call is counted; the per-iteration average is reported in
/// the trace metadata.
OptimizerTrace nelder_mead(const ControlProblem& problem, FidelityEstimator& estimator,
                           ControlVector init, const NelderMeadConfig& config,
                           const StoppingRule& stop,
                           std::span<const std::int64_t> grid = {});

/// Model-based baseline: central finite differences + fixed-step ascent with
/// backtracking halving on non-improvement.
struct ExSituConfig {
  double fd_step = 1e-6;
  double step_size = 1.0;
  double min_step = 1e-10;
};

/// Gradient ascent on the model problem's exact fidelity. The trace's
/// fidelity column is evaluated under `truth`; the model objective of each
/// iterate is kept in trace.model_fidelity. Calls count model evaluations and
/// the experiments column is NaN.
OptimizerTrace ex_situ_gradient(const ControlProblem& model, const ControlProblem& truth,
                                std::int64_t iterations, ControlVector init,
                                const ExSituConfig& config = {},
                                std::span<const std::int64_t> grid = {});

}  // namespace insitu

#endif
