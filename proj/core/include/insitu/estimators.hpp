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

#ifndef INSITU_ESTIMATORS_HPP
#define INSITU_ESTIMATORS_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <random>

#include "insitu/problems.hpp"

namespace insitu {

/// Stochastic fidelity oracle: the "experiment" an optimizer is allowed to
/// query. Every estimate() invocation increments the call counter by exactly
/// one. Each instance owns its random stream; one trial uses one instance.
class FidelityEstimator {
 public:
  virtual ~FidelityEstimator() = default;

  double estimate(const ControlVector& controls) {
    ++calls_;
    return sample(controls);
  }

  /// Cumulative number of estimate() invocations.
  std::int64_t calls() const { return calls_; }

  /// Experiments consumed per estimate; +infinity for exact oracles.
  virtual double shots_per_estimate() const = 0;

 private:
  virtual double sample(const ControlVector& controls) = 0;

  std::int64_t calls_ = 0;
};

/// Computes the fidelity to machine precision; deterministic.
class ExactEstimator final : public FidelityEstimator {
 public:
  explicit ExactEstimator(std::shared_ptr<const ControlProblem> problem)
      : problem_(std::move(problem)) {}

  double shots_per_estimate() const override {
    return std::numeric_limits<double>::infinity();
  }

 private:
  double sample(const ControlVector& controls) override {
    return problem_->fidelity(controls);
  }

  std::shared_ptr<const ControlProblem> problem_;
};

/// Shot-noise model: an estimate with N experiments is K/N with
/// K ~ Binomial(N, f(c)). Sampled as one distribution draw, so the cost per
/// estimate is O(1) in N.
class BinomialEstimator final : public FidelityEstimator {
 public:
  BinomialEstimator(std::shared_ptr<const ControlProblem> problem, std::int64_t shots,
                    std::mt19937_64 rng);

  double shots_per_estimate() const override { return static_cast<double>(shots_); }

 private:
  double sample(const ControlVector& controls) override;

  std::shared_ptr<const ControlProblem> problem_;
  std::int64_t shots_;
  std::mt19937_64 rng_;
};

/// Per-component control noise standard deviation.
struct ControlNoiseConfig {
  double sigma = 1e-2;
};

/// Technical-noise model: the requested controls c are implemented as c + eps
/// with eps ~ Normal(0, sigma^2 I), drawn fresh on every call.
class ControlNoiseWrapper final : public FidelityEstimator {
 public:
  ControlNoiseWrapper(std::unique_ptr<FidelityEstimator> inner, ControlNoiseConfig config,
                      std::mt19937_64 rng);

  double shots_per_estimate() const override { return inner_->shots_per_estimate(); }
  const FidelityEstimator& inner() const { return *inner_; }

 private:
  double sample(const ControlVector& controls) override;

  std::unique_ptr<FidelityEstimator> inner_;
  ControlNoiseConfig config_;
  std::mt19937_64 rng_;
};

}  // namespace insitu

#endif
