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

#include "insitu/estimators.hpp"

#include <stdexcept>

namespace insitu {

BinomialEstimator::BinomialEstimator(std::shared_ptr<const ControlProblem> problem,
                                     std::int64_t shots, std::mt19937_64 rng)
    : problem_(std::move(problem)), shots_(shots), rng_(rng) {
  if (shots_ < 1) {
    throw std::invalid_argument("BinomialEstimator: shots must be >= 1");
  }
}

double BinomialEstimator::sample(const ControlVector& controls) {
  const double f = problem_->fidelity(controls);
  std::binomial_distribution<std::int64_t> binomial(shots_, f);
  return static_cast<double>(binomial(rng_)) / static_cast<double>(shots_);
}

ControlNoiseWrapper::ControlNoiseWrapper(std::unique_ptr<FidelityEstimator> inner,
                                         ControlNoiseConfig config, std::mt19937_64 rng)
    : inner_(std::move(inner)), config_(config), rng_(rng) {
  if (config_.sigma < 0.0) {
    throw std::invalid_argument("ControlNoiseWrapper: sigma must be >= 0");
  }
}

double ControlNoiseWrapper::sample(const ControlVector& controls) {
  if (config_.sigma == 0.0) {
    return inner_->estimate(controls);
  }
  std::normal_distribution<double> gauss(0.0, config_.sigma);
  ControlVector noisy = controls;
  for (Eigen::Index i = 0; i < noisy.size(); ++i) {
    noisy[i] += gauss(rng_);
  }
  return inner_->estimate(noisy);
}

}  // namespace insitu
