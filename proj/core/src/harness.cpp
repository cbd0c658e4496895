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

#include "insitu/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace insitu {

std::vector<std::int64_t> iteration_grid(std::int64_t k_max, int points_per_decade) {
  if (k_max < 1) {
    throw std::invalid_argument("iteration_grid: k_max must be >= 1");
  }
  if (points_per_decade < 1) {
    throw std::invalid_argument("iteration_grid: points_per_decade must be >= 1");
  }
  std::vector<std::int64_t> grid{0};
  std::int64_t last = 0;
  for (int i = 0;; ++i) {
    const double value = std::pow(10.0, static_cast<double>(i) / points_per_decade);
    const std::int64_t k = std::llround(value);
    if (k > k_max) {
      break;
    }
    if (k > last) {
      grid.push_back(k);
      last = k;
    }
  }
  if (last != k_max) {
    grid.push_back(k_max);
  }
  return grid;
}

std::mt19937_64 derive_stream(std::uint64_t base_seed, std::uint64_t trial,
                              std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

std::shared_ptr<const ControlProblem> make_problem(const ProblemConfig& config,
                                                   std::mt19937_64& target_rng) {
  const Eigen::Index dim = config.kind == ProblemKind::SingleQubit ? 2 : 4;
  auto draw_target = [&]() -> UnitaryMatrix {
    switch (config.target) {
      case TargetKind::Haar:
        return haar_random_unitary(dim, target_rng);
      case TargetKind::Cnot:
        if (dim != 4) {
          throw std::invalid_argument("make_problem: cnot target needs the two-qubit problem");
        }
        return cnot_gate();
      case TargetKind::Reachable: {
        // Random controls in [-1, 1]^p; the target is the unitary they reach.
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        if (config.kind == ProblemKind::SingleQubit) {
          SingleQubitProblem bare(UnitaryMatrix(ComplexMatrix::Identity(2, 2)),
                                  config.segments, config.omega0, config.dt);
          ControlVector c(bare.control_dim());
          for (Eigen::Index i = 0; i < c.size(); ++i) {
            c[i] = uniform(target_rng);
          }
          return bare.unitary(c);
        }
        CnotProblem bare(UnitaryMatrix(ComplexMatrix::Identity(4, 4)), config.segments,
                         config.delta1, config.delta2, config.coupling, config.dt);
        ControlVector c(bare.control_dim());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
          c[i] = uniform(target_rng);
        }
        return bare.unitary(c);
      }
    }
    throw std::logic_error("make_problem: unreachable");
  };

  if (config.kind == ProblemKind::SingleQubit) {
    return std::make_shared<SingleQubitProblem>(draw_target(), config.segments,
                                                config.omega0, config.dt);
  }
  return std::make_shared<CnotProblem>(draw_target(), config.segments, config.delta1,
                                       config.delta2, config.coupling, config.dt);
}

std::unique_ptr<FidelityEstimator> make_estimator(const EstimatorConfig& config,
                                                  std::shared_ptr<const ControlProblem> problem,
                                                  std::mt19937_64 sample_rng,
                                                  std::mt19937_64 noise_rng) {
  if (config.shots < 0) {
    throw std::invalid_argument("make_estimator: shots must be >= 0 (0 = exact)");
  }
  std::unique_ptr<FidelityEstimator> estimator;
  if (config.shots == 0) {
    estimator = std::make_unique<ExactEstimator>(std::move(problem));
  } else {
    estimator =
        std::make_unique<BinomialEstimator>(std::move(problem), config.shots, sample_rng);
  }
  if (config.control_noise_sigma > 0.0) {
    estimator = std::make_unique<ControlNoiseWrapper>(
        std::move(estimator), ControlNoiseConfig{config.control_noise_sigma}, noise_rng);
  }
  return estimator;
}

ControlVector make_init(InitKind kind, int dim, std::mt19937_64& rng) {
  if (kind == InitKind::Zero) {
    return ControlVector::Zero(dim);
  }
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  ControlVector init(dim);
  for (Eigen::Index i = 0; i < init.size(); ++i) {
    init[i] = uniform(rng);
  }
  return init;
}

namespace {

// Stream tags; one substream per purpose so optional components never shift
// the draws of others.
enum StreamTag : std::uint64_t {
  kTargetStream = 0,
  kInitStream = 1,
  kEstimatorStream = 2,
  kOptimizerStream = 3,
  kControlNoiseStream = 4,
  kMismatchStream = 5,
};

OptimizerTrace run_single_trial(const ExperimentConfig& config, int trial,
                                std::span<const std::int64_t> grid) {
  auto target_rng = derive_stream(config.seed, trial, kTargetStream);
  auto init_rng = derive_stream(config.seed, trial, kInitStream);

  auto problem = make_problem(config.problem, target_rng);
  const ControlVector init = make_init(config.init, problem->control_dim(), init_rng);

  switch (config.optimizer.kind) {
    case OptimizerKind::Acronym: {
      auto estimator = make_estimator(config.estimator, problem,
                                      derive_stream(config.seed, trial, kEstimatorStream),
                                      derive_stream(config.seed, trial, kControlNoiseStream));
      return run_spsa(*problem, *estimator, config.optimizer.schedule, init, config.stopping,
                      derive_stream(config.seed, trial, kOptimizerStream), grid);
    }
    case OptimizerKind::NelderMead: {
      auto estimator = make_estimator(config.estimator, problem,
                                      derive_stream(config.seed, trial, kEstimatorStream),
                                      derive_stream(config.seed, trial, kControlNoiseStream));
      return nelder_mead(*problem, *estimator, init, config.optimizer.nelder_mead,
                         config.stopping, grid);
    }
    case OptimizerKind::ExSitu: {
      auto qubit = std::dynamic_pointer_cast<const SingleQubitProblem>(problem);
      if (!qubit) {
        throw std::invalid_argument(
            "run_trials: the ex-situ optimizer supports only the single-qubit problem");
      }
      auto mismatch_rng = derive_stream(config.seed, trial, kMismatchStream);
      const DriftPerturbation delta =
          random_drift_perturbation(2, config.optimizer.model_mismatch_norm, mismatch_rng);
      const SingleQubitProblem model = perturbed_problem(*qubit, delta);
      return ex_situ_gradient(model, *problem, config.stopping.max_iterations, init,
                              config.optimizer.ex_situ, grid);
    }
  }
  throw std::logic_error("run_trials: unreachable");
}

int resolve_workers(int workers, int jobs) {
  if (workers < 1) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (workers < 1) {
    workers = 1;
  }
  return std::min(workers, jobs);
}

}  // namespace

std::vector<OptimizerTrace> run_trials(const ExperimentConfig& config, int workers) {
  if (config.trials < 1) {
    throw std::invalid_argument("run_trials: trial count must be >= 1");
  }
  const auto grid = iteration_grid(config.stopping.max_iterations, config.grid_per_decade);

  std::vector<OptimizerTrace> traces(config.trials);
  std::vector<std::pair<int, std::string>> failures;
  std::mutex failures_mutex;
  std::atomic<int> next_trial{0};

  auto work = [&] {
    for (;;) {
      const int trial = next_trial.fetch_add(1);
      if (trial >= config.trials) {
        return;
      }
      try {
        traces[trial] = run_single_trial(config, trial, grid);
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(failures_mutex);
        failures.emplace_back(trial, e.what());
      }
    }
  };

  const int n_workers = resolve_workers(workers, config.trials);
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) {
      pool.emplace_back(work);
    }
    for (auto& thread : pool) {
      thread.join();
    }
  }
  if (!failures.empty()) {
    const auto worst = *std::min_element(failures.begin(), failures.end());
    throw std::runtime_error("run_trials: trial " + std::to_string(worst.first) +
                             " failed: " + worst.second);
  }
  return traces;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("quantile: empty sample");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("quantile: q must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) {
    return values.back();
  }
  // Equal endpoints short-circuit so interpolating between infinities stays
  // finite in the difference.
  if (values[lo] == values[lo + 1]) {
    return values[lo];
  }
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

AggregateSeries aggregate(const std::vector<OptimizerTrace>& traces) {
  if (traces.empty()) {
    throw std::invalid_argument("aggregate: need at least one trace");
  }
  const auto& reference = traces.front().points;
  for (const auto& trace : traces) {
    if (trace.points.size() != reference.size()) {
      throw std::invalid_argument("aggregate: mismatched iteration grids");
    }
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (trace.points[j].iteration != reference[j].iteration) {
        throw std::invalid_argument("aggregate: mismatched iteration grids");
      }
    }
  }

  AggregateSeries series;
  const std::size_t n_points = reference.size();
  series.iterations.reserve(n_points);
  for (std::size_t j = 0; j < n_points; ++j) {
    series.iterations.push_back(reference[j].iteration);
    std::vector<double> infidelity;
    std::vector<double> experiments;
    infidelity.reserve(traces.size());
    experiments.reserve(traces.size());
    for (const auto& trace : traces) {
      infidelity.push_back(1.0 - trace.points[j].fidelity);
      experiments.push_back(trace.points[j].experiments);
    }
    series.median_infidelity.push_back(quantile(infidelity, 0.5));
    series.q25.push_back(quantile(infidelity, 0.25));
    series.q75.push_back(quantile(infidelity, 0.75));
    series.n_tot.push_back(quantile(experiments, 0.5));
  }
  return series;
}

PowerLawFit fit_exponent(const AggregateSeries& series, std::int64_t k_lo,
                         std::int64_t k_hi) {
  if (k_lo > k_hi) {
    throw std::invalid_argument("fit_exponent: k_lo must not exceed k_hi");
  }
  std::vector<double> log_k;
  std::vector<double> log_y;
  for (std::size_t j = 0; j < series.iterations.size(); ++j) {
    const std::int64_t k = series.iterations[j];
    if (k < 1 || k < k_lo || k > k_hi) {
      continue;
    }
    const double y = series.median_infidelity[j];
    if (!(y > 0.0)) {
      throw std::domain_error("fit_exponent: log-domain error, nonpositive median at k = " +
                              std::to_string(k));
    }
    log_k.push_back(std::log(static_cast<double>(k)));
    log_y.push_back(std::log(y));
  }
  const int n = static_cast<int>(log_k.size());
  if (n < 5) {
    throw std::invalid_argument("fit_exponent: fit range must contain at least 5 grid points");
  }

  double mean_x = 0.0;
  double mean_y = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_x += log_k[i];
    mean_y += log_y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = log_k[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (log_y[i] - mean_y);
  }
  PowerLawFit fit;
  fit.beta = sxy / sxx;
  fit.intercept = mean_y - fit.beta * mean_x;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = log_y[i] - (fit.intercept + fit.beta * log_k[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  fit.k_lo = k_lo;
  fit.k_hi = k_hi;
  fit.points = n;
  return fit;
}

bool clamp_infidelity_floor(AggregateSeries& series, double floor) {
  bool clamped = false;
  auto clamp = [&](std::vector<double>& values) {
    for (double& v : values) {
      if (v < floor) {
        v = floor;
        clamped = true;
      }
    }
  };
  clamp(series.median_infidelity);
  clamp(series.q25);
  clamp(series.q75);
  return clamped;
}

std::vector<SweepRow> sweep_shots(const ExperimentConfig& config,
                                  const std::vector<std::int64_t>& shot_values,
                                  int workers) {
  if (shot_values.empty()) {
    throw std::invalid_argument("sweep_shots: shot list is empty");
  }
  for (const auto shots : shot_values) {
    if (shots < 1) {
      throw std::invalid_argument("sweep_shots: shot counts must be >= 1");
    }
  }
  auto run_one = [&](std::int64_t shots) {
    ExperimentConfig variant = config;
    variant.estimator.shots = shots;  // 0 selects the exact reference
    const AggregateSeries series = aggregate(run_trials(variant, workers));
    const std::size_t j = series.iterations.size() - 1;
    SweepRow row;
    row.shots = shots == 0 ? std::numeric_limits<double>::infinity()
                           : static_cast<double>(shots);
    row.n_tot = series.n_tot[j];
    row.median_infidelity = series.median_infidelity[j];
    row.q25 = series.q25[j];
    row.q75 = series.q75[j];
    return row;
  };

  std::vector<SweepRow> rows;
  rows.reserve(shot_values.size() + 1);
  for (const auto shots : shot_values) {
    rows.push_back(run_one(shots));
  }
  rows.push_back(run_one(0));
  return rows;
}

}  // namespace insitu
