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

#include "insitu/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace insitu {

namespace {

// Walks a sorted iteration grid; an empty grid means "record everything".
struct GridCursor {
  std::span<const std::int64_t> grid;
  std::size_t next = 0;

  bool hit(std::int64_t k) {
    if (grid.empty()) {
      return true;
    }
    while (next < grid.size() && grid[next] < k) {
      ++next;
    }
    if (next < grid.size() && grid[next] == k) {
      ++next;
      return true;
    }
    return false;
  }
};

double experiments_consumed(const FidelityEstimator& estimator) {
  if (estimator.calls() == 0) {
    return 0.0;
  }
  return estimator.shots_per_estimate() * static_cast<double>(estimator.calls());
}

std::vector<ControlVector> initial_simplex(const ControlVector& origin,
                                           const NelderMeadConfig& config) {
  std::vector<ControlVector> vertices(origin.size() + 1, origin);
  for (Eigen::Index i = 0; i < origin.size(); ++i) {
    ControlVector& v = vertices[i + 1];
    v[i] = (v[i] != 0.0) ? v[i] * (1.0 + config.nonzero_delta) : config.zero_delta;
  }
  return vertices;
}

}  // namespace

std::pair<double, double> GainSchedule::gains(std::int64_t k) const {
  if (k < 0) {
    throw std::invalid_argument("GainSchedule::gains: iteration index must be >= 0");
  }
  if (!(a > 0.0) || !(b > 0.0) || !(s > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("GainSchedule: a, b, s, t must all be positive");
  }
  const double base = static_cast<double>(k) + 1.0;
  return {a / std::pow(base, s), b / std::pow(base, t)};
}

ControlVector spsa_gradient(FidelityEstimator& estimator, const ControlVector& controls,
                            double beta, const ControlVector& direction) {
  if (direction.size() != controls.size()) {
    throw std::invalid_argument("spsa_gradient: direction dimension mismatch");
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("spsa_gradient: beta must be positive");
  }
  const double f_plus = estimator.estimate(controls + beta * direction);
  const double f_minus = estimator.estimate(controls - beta * direction);
  const double slope = (f_plus - f_minus) / (2.0 * beta);
  // Elementwise product with the +-1 direction (identical to division).
  return slope * direction;
}

SpsaState spsa_iteration(SpsaState state, FidelityEstimator& estimator,
                         const GainSchedule& schedule) {
  const auto [alpha, beta] = schedule.gains(state.iteration);
  std::bernoulli_distribution coin(0.5);
  ControlVector direction(state.controls.size());
  for (Eigen::Index i = 0; i < direction.size(); ++i) {
    direction[i] = coin(state.rng) ? 1.0 : -1.0;
  }
  state.controls += alpha * spsa_gradient(estimator, state.controls, beta, direction);
  ++state.iteration;
  return state;
}

OptimizerTrace run_spsa(const ControlProblem& problem, FidelityEstimator& estimator,
                        const GainSchedule& schedule, ControlVector init,
                        const StoppingRule& stop, std::mt19937_64 rng,
                        std::span<const std::int64_t> grid) {
  if (init.size() != problem.control_dim()) {
    throw std::invalid_argument("run_spsa: init dimension mismatch");
  }
  if (stop.max_iterations < 1) {
    throw std::invalid_argument("run_spsa: max_iterations must be >= 1");
  }
  OptimizerTrace trace;
  trace.optimizer = "acronym";
  GridCursor cursor{grid};
  SpsaState state{std::move(init), 0, rng};
  auto record = [&](std::int64_t k, const ControlVector& c) {
    trace.points.push_back(
        {k, estimator.calls(), experiments_consumed(estimator), problem.fidelity(c), c});
  };
  if (cursor.hit(0)) {
    record(0, state.controls);
  }
  while (state.iteration < stop.max_iterations) {
    const ControlVector previous = state.controls;
    state = spsa_iteration(std::move(state), estimator, schedule);
    const bool due = cursor.hit(state.iteration);
    const bool converged =
        stop.epsilon.has_value() && (state.controls - previous).norm() <= *stop.epsilon;
    if (due || converged) {
      record(state.iteration, state.controls);
    }
    if (converged) {
      trace.stop_reason = StopReason::ToleranceReached;
      break;
    }
  }
  trace.iterations = state.iteration;
  trace.total_calls = estimator.calls();
  trace.mean_calls_per_iteration =
      trace.iterations > 0 ? static_cast<double>(trace.total_calls) / trace.iterations : 0.0;
  return trace;
}

OptimizerTrace nelder_mead(const ControlProblem& problem, FidelityEstimator& estimator,
                           ControlVector init, const NelderMeadConfig& config,
                           const StoppingRule& stop, std::span<const std::int64_t> grid) {
  if (!(config.reflection > 0.0) || !(config.expansion > config.reflection) ||
      !(config.contraction > 0.0 && config.contraction < 1.0) ||
      !(config.shrink > 0.0 && config.shrink < 1.0)) {
    throw std::invalid_argument("nelder_mead: invalid coefficient ordering");
  }
  if (init.size() != problem.control_dim()) {
    throw std::invalid_argument("nelder_mead: init dimension mismatch");
  }
  if (stop.max_iterations < 1) {
    throw std::invalid_argument("nelder_mead: max_iterations must be >= 1");
  }

  // Descent on 1 - estimated fidelity.
  auto objective = [&](const ControlVector& c) { return 1.0 - estimator.estimate(c); };

  using Vertex = std::pair<double, ControlVector>;
  std::vector<Vertex> sim;
  // Takes the origin by value: restarts pass a vertex that lives in `sim`,
  // which clear() would otherwise invalidate.
  auto rebuild = [&](ControlVector origin) {
    sim.clear();
    for (auto& v : initial_simplex(origin, config)) {
      double value = objective(v);
      sim.emplace_back(value, std::move(v));
    }
  };
  auto sort_sim = [&] {
    std::stable_sort(sim.begin(), sim.end(),
                     [](const Vertex& u, const Vertex& v) { return u.first < v.first; });
  };
  auto simplex_size = [&] {
    double size = 0.0;
    for (std::size_t i = 1; i < sim.size(); ++i) {
      size = std::max(size, (sim[i].second - sim[0].second).cwiseAbs().maxCoeff());
    }
    return size;
  };

  rebuild(init);
  sort_sim();

  OptimizerTrace trace;
  trace.optimizer = "nm";
  GridCursor cursor{grid};
  auto record = [&](std::int64_t k) {
    trace.points.push_back({k, estimator.calls(), experiments_consumed(estimator),
                            problem.fidelity(sim[0].second), sim[0].second});
  };
  if (cursor.hit(0)) {
    record(0);
  }

  const std::size_t n = sim.size() - 1;
  std::int64_t k = 0;
  while (k < stop.max_iterations) {
    ++k;
    ControlVector centroid = ControlVector::Zero(init.size());
    for (std::size_t i = 0; i < n; ++i) {
      centroid += sim[i].second;
    }
    centroid /= static_cast<double>(n);

    const ControlVector& worst = sim[n].second;
    const double f_best = sim[0].first;
    const double f_second_worst = sim[n - 1].first;
    const double f_worst = sim[n].first;

    bool do_shrink = false;
    ControlVector reflected = centroid + config.reflection * (centroid - worst);
    const double f_reflected = objective(reflected);
    if (f_reflected < f_best) {
      ControlVector expanded =
          centroid + config.reflection * config.expansion * (centroid - worst);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        sim[n] = {f_expanded, std::move(expanded)};
      } else {
        sim[n] = {f_reflected, std::move(reflected)};
      }
    } else if (f_reflected < f_second_worst) {
      sim[n] = {f_reflected, std::move(reflected)};
    } else if (f_reflected < f_worst) {
      ControlVector contracted =
          centroid + config.contraction * config.reflection * (centroid - worst);
      const double f_contracted = objective(contracted);
      if (f_contracted <= f_reflected) {
        sim[n] = {f_contracted, std::move(contracted)};
      } else {
        do_shrink = true;
      }
    } else {
      ControlVector contracted = centroid - config.contraction * (centroid - worst);
      const double f_contracted = objective(contracted);
      if (f_contracted < f_worst) {
        sim[n] = {f_contracted, std::move(contracted)};
      } else {
        do_shrink = true;
      }
    }
    if (do_shrink) {
      for (std::size_t i = 1; i < sim.size(); ++i) {
        sim[i].second = sim[0].second + config.shrink * (sim[i].second - sim[0].second);
        sim[i].first = objective(sim[i].second);
      }
    }
    sort_sim();

    const double size = simplex_size();
    const bool converged = stop.epsilon.has_value() && size <= *stop.epsilon;
    if (!converged && size < config.degenerate_size) {
      rebuild(sim[0].second);
      sort_sim();
    }
    if (cursor.hit(k) || converged) {
      record(k);
    }
    if (converged) {
      trace.stop_reason = StopReason::ToleranceReached;
      break;
    }
  }
  trace.iterations = k;
  trace.total_calls = estimator.calls();
  trace.mean_calls_per_iteration = static_cast<double>(trace.total_calls) / k;
  return trace;
}

OptimizerTrace ex_situ_gradient(const ControlProblem& model, const ControlProblem& truth,
                                std::int64_t iterations, ControlVector init,
                                const ExSituConfig& config,
                                std::span<const std::int64_t> grid) {
  if (model.control_dim() != truth.control_dim()) {
    throw std::invalid_argument("ex_situ_gradient: model/truth control dimension mismatch");
  }
  if (init.size() != model.control_dim()) {
    throw std::invalid_argument("ex_situ_gradient: init dimension mismatch");
  }
  OptimizerTrace trace;
  trace.optimizer = "exsitu";
  std::int64_t evaluations = 0;
  auto model_value = [&](const ControlVector& c) {
    ++evaluations;
    return model.fidelity(c);
  };
  GridCursor cursor{grid};
  auto record = [&](std::int64_t k, const ControlVector& c, double f_model) {
    trace.points.push_back({k, evaluations, std::numeric_limits<double>::quiet_NaN(),
                            truth.fidelity(c), c});
    trace.model_fidelity.push_back(f_model);
  };

  ControlVector current = std::move(init);
  double f_current = model_value(current);
  if (cursor.hit(0)) {
    record(0, current, f_current);
  }
  std::int64_t k = 0;
  while (k < iterations) {
    ++k;
    ControlVector gradient(current.size());
    for (Eigen::Index i = 0; i < current.size(); ++i) {
      ControlVector forward = current;
      ControlVector backward = current;
      forward[i] += config.fd_step;
      backward[i] -= config.fd_step;
      gradient[i] = (model_value(forward) - model_value(backward)) / (2.0 * config.fd_step);
    }
    if (gradient.norm() > 0.0) {
      double step = config.step_size;
      while (step >= config.min_step) {
        ControlVector candidate = current + step * gradient;
        const double f_candidate = model_value(candidate);
        if (f_candidate > f_current) {
          current = std::move(candidate);
          f_current = f_candidate;
          break;
        }
        step *= 0.5;
      }
    }
    if (cursor.hit(k)) {
      record(k, current, f_current);
    }
  }
  trace.iterations = k;
  trace.total_calls = evaluations;
  trace.mean_calls_per_iteration =
      k > 0 ? static_cast<double>(evaluations) / static_cast<double>(k) : 0.0;
  return trace;
}

}  // namespace insitu
