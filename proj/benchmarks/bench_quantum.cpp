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

#include "insitu/problems.hpp"
#include "insitu/quantum.hpp"

using namespace insitu;

namespace {

HermitianOperator random_h(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      a(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  return HermitianOperator(0.5 * (a + a.adjoint().eval()));
}

void BM_ExpmHermitian(benchmark::State& state) {
  const HermitianOperator h = random_h(state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expm_hermitian(h, 1.0));
  }
}
BENCHMARK(BM_ExpmHermitian)->Arg(2)->Arg(4);

void BM_GateFidelity(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const UnitaryMatrix u = haar_random_unitary(state.range(0), rng);
  const UnitaryMatrix v = haar_random_unitary(state.range(0), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gate_fidelity(u, v));
  }
}
BENCHMARK(BM_GateFidelity)->Arg(2)->Arg(4);

void BM_HaarRandomUnitary(benchmark::State& state) {
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(haar_random_unitary(state.range(0), rng));
  }
}
BENCHMARK(BM_HaarRandomUnitary)->Arg(2)->Arg(4);

void BM_SingleQubitPropagator(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const SingleQubitProblem problem(haar_random_unitary(2, rng),
                                   static_cast<int>(state.range(0)));
  const ControlVector c = ControlVector::Constant(state.range(0), 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(problem.unitary(c));
  }
}
BENCHMARK(BM_SingleQubitPropagator)->Arg(10)->Arg(40);

void BM_CnotPropagator(benchmark::State& state) {
  const CnotProblem problem;
  const ControlVector c = ControlVector::Constant(40, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(problem.unitary(c));
  }
}
BENCHMARK(BM_CnotPropagator);

}  // namespace

BENCHMARK_MAIN();
