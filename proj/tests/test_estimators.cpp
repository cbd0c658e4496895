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

#include <cmath>
#include <memory>

#include <doctest.h>

#include "insitu/estimators.hpp"
#include "oracles.hpp"

using namespace insitu;

namespace {

std::shared_ptr<const SingleQubitProblem> make_realizable_problem(std::uint64_t seed,
                                                                  ControlVector* c_star) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  SingleQubitProblem scaffold(UnitaryMatrix{ComplexMatrix::Identity(2, 2)}, 10);
  ControlVector c(10);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c[i] = uniform(rng);
  }
  if (c_star != nullptr) {
    *c_star = c;
  }
  return std::make_shared<SingleQubitProblem>(scaffold.unitary(c), 10);
}

}  // namespace

TEST_CASE("exact estimator is deterministic and counts calls") {
  ControlVector c_star;
  auto problem = make_realizable_problem(1, &c_star);
  ExactEstimator estimator(problem);
  CHECK(estimator.shots_per_estimate() == std::numeric_limits<double>::infinity());

  const ControlVector c = ControlVector::Constant(10, 0.2);
  const double first = estimator.estimate(c);
  for (int i = 0; i < 9; ++i) {
    CHECK(estimator.estimate(c) == first);
  }
  CHECK(estimator.calls() == 10);
  CHECK(estimator.estimate(c_star) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimator.calls() == 11);
}

TEST_CASE("binomial estimator hits the deterministic endpoints") {
  ControlVector c_star;
  auto problem = make_realizable_problem(2, &c_star);
  BinomialEstimator estimator(problem, 100, std::mt19937_64(5));
  // f = 1 at the self-target controls: Bin(N, 1) = N.
  CHECK(estimator.estimate(c_star) == 1.0);

  // f = 0 exactly when the target is X and the controls vanish.
  auto against_x = std::make_shared<SingleQubitProblem>(
      UnitaryMatrix{pauli(PauliAxis::X, 0, 1).matrix()}, 10);
  BinomialEstimator zero(against_x, 1000, std::mt19937_64(6));
  CHECK(zero.estimate(ControlVector::Zero(10)) == 0.0);

  CHECK_THROWS_AS(BinomialEstimator(problem, 0, std::mt19937_64(7)),
                  std::invalid_argument);
}

TEST_CASE("binomial estimator is unbiased per the binomial oracle") {
  // Mean of 1e5 estimates at f = 0.7, N = 100 within 3 sigma of f.
  auto fixed = std::make_shared<test::FunctionProblem>(
      2, [](const ControlVector&) { return 0.7; });
  BinomialEstimator estimator(fixed, 100, std::mt19937_64(8));
  const ControlVector c = ControlVector::Zero(2);
  const int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double value = estimator.estimate(c);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
    sum += value;
  }
  const double tolerance = 3.0 * std::sqrt(0.7 * 0.3 / 100.0 / draws);
  CHECK(std::abs(sum / draws - 0.7) < tolerance);
  CHECK(estimator.calls() == draws);
}

TEST_CASE("identical seeds reproduce identical estimate sequences") {
  auto problem = make_realizable_problem(3, nullptr);
  BinomialEstimator a(problem, 250, std::mt19937_64(99));
  BinomialEstimator b(problem, 250, std::mt19937_64(99));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    ControlVector c(10);
    for (Eigen::Index j = 0; j < 10; ++j) {
      c[j] = uniform(rng);
    }
    CHECK(a.estimate(c) == b.estimate(c));
  }
}

TEST_CASE("control noise wrapper: degenerate sigma, counters, variance, iid") {
  auto problem = make_realizable_problem(4, nullptr);
  const ControlVector c = ControlVector::Constant(10, 0.1);

  SUBCASE("sigma = 0 reproduces the inner estimator") {
    ControlNoiseWrapper wrapped(std::make_unique<BinomialEstimator>(problem, 500,
                                                                    std::mt19937_64(11)),
                                ControlNoiseConfig{0.0}, std::mt19937_64(12));
    BinomialEstimator bare(problem, 500, std::mt19937_64(11));
    for (int i = 0; i < 20; ++i) {
      CHECK(wrapped.estimate(c) == bare.estimate(c));
    }
    CHECK(wrapped.calls() == 20);
    CHECK(wrapped.inner().calls() == 20);
  }

  SUBCASE("variance matches first-order propagation within a factor of 2") {
    ControlNoiseWrapper wrapped(std::make_unique<ExactEstimator>(problem),
                                ControlNoiseConfig{1e-2}, std::mt19937_64(13));
    const int draws = 20000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double value = wrapped.estimate(c);
      sum += value;
      sum_sq += value * value;
    }
    const double mean = sum / draws;
    const double variance = sum_sq / draws - mean * mean;
    const ControlVector gradient = test::numeric_gradient(
        [&](const ControlVector& at) { return problem->fidelity(at); }, c);
    const double predicted = 1e-4 * gradient.squaredNorm();
    CHECK(variance > predicted / 2.0);
    CHECK(variance < predicted * 2.0);
    CHECK(wrapped.calls() == wrapped.inner().calls());
  }

  SUBCASE("noise draws are independent across calls") {
    ControlNoiseWrapper wrapped(std::make_unique<ExactEstimator>(problem),
                                ControlNoiseConfig{1e-2}, std::mt19937_64(14));
    const int draws = 10000;
    std::vector<double> values(draws);
    for (int i = 0; i < draws; ++i) {
      values[i] = wrapped.estimate(c);
    }
    double mean = 0.0;
    for (const double v : values) {
      mean += v;
    }
    mean /= draws;
    double numerator = 0.0;
    double denominator = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double centered = values[i] - mean;
      denominator += centered * centered;
      if (i + 1 < draws) {
        numerator += centered * (values[i + 1] - mean);
      }
    }
    CHECK(std::abs(numerator / denominator) < 0.03);
  }

  SUBCASE("negative sigma is rejected") {
    CHECK_THROWS_AS(ControlNoiseWrapper(std::make_unique<ExactEstimator>(problem),
                                        ControlNoiseConfig{-1.0}, std::mt19937_64(15)),
                    std::invalid_argument);
  }
}
