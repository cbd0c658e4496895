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

#include <benchmark/benchmark.h>

#include <memory>

#include "insitu/estimators.hpp"
#include "insitu/optimizers.hpp"

using namespace insitu;

namespace {

std::shared_ptr<const SingleQubitProblem> qubit_problem(int segments) {
  std::mt19937_64 rng(7);
  return std::make_shared<SingleQubitProblem>(haar_random_unitary(2, rng), segments);
}

void BM_BinomialEstimate(benchmark::State& state) {
  auto problem = qubit_problem(10);
  BinomialEstimator estimator(problem, state.range(0), std::mt19937_64(8));
  const ControlVector c = ControlVector::Constant(10, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimator.estimate(c));
  }
}
BENCHMARK(BM_BinomialEstimate)->Arg(1000)->Arg(100000);

void BM_SpsaIteration(benchmark::State& state) {
  auto problem = qubit_problem(static_cast<int>(state.range(0)));
  BinomialEstimator estimator(problem, 1000, std::mt19937_64(9));
  const GainSchedule schedule = GainSchedule::set_b();
  SpsaState spsa{ControlVector::Zero(state.range(0)), 0, std::mt19937_64(10)};
  for (auto _ : state) {
    spsa = spsa_iteration(std::move(spsa), estimator, schedule);
  }
}
BENCHMARK(BM_SpsaIteration)->Arg(10)->Arg(40);

void BM_NelderMeadRun(benchmark::State& state) {
  auto problem = qubit_problem(10);
  for (auto _ : state) {
    BinomialEstimator estimator(problem, 1000, std::mt19937_64(11));
    benchmark::DoNotOptimize(nelder_mead(*problem, estimator, ControlVector::Zero(10),
                                         NelderMeadConfig{},
                                         StoppingRule{std::nullopt, 100},
                                         std::vector<std::int64_t>{0, 100}));
  }
}
BENCHMARK(BM_NelderMeadRun);

}  // namespace

BENCHMARK_MAIN();
