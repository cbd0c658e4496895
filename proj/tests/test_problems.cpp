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

#include <doctest.h>

#include "insitu/problems.hpp"
#include "oracles.hpp"

using namespace insitu;

namespace {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

ControlVector random_controls(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> uniform(-scale, scale);
  ControlVector c(dim);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c[i] = uniform(rng);
  }
  return c;
}

// Brute-force propagator: product of series-oracle segment exponentials.
ComplexMatrix series_propagator(const std::vector<ComplexMatrix>& segments, double dt) {
  ComplexMatrix u = ComplexMatrix::Identity(segments.front().rows(), segments.front().cols());
  for (const auto& h : segments) {
    u = test::taylor_expm(h, dt) * u;
  }
  return u;
}

}  // namespace

TEST_CASE("single-qubit propagator closed cases") {
  const UnitaryMatrix identity{ComplexMatrix::Identity(2, 2)};

  SingleQubitProblem one_segment(identity, 1);
  const ComplexMatrix u1 = one_segment.unitary(ControlVector::Zero(1)).matrix();
  CHECK(std::abs(u1(0, 0) - std::exp(Complex(0, -1))) < 1e-15);
  CHECK(std::abs(u1(1, 1) - std::exp(Complex(0, 1))) < 1e-15);
  CHECK(std::abs(u1(0, 1)) == 0.0);

  SingleQubitProblem ten_segments(identity, 10);
  CHECK(max_abs_diff(ten_segments.unitary(ControlVector::Zero(10)).matrix(),
                     expm_hermitian(pauli(PauliAxis::Z, 0, 1), 10.0).matrix()) < 1e-13);

  CHECK_THROWS_AS(ten_segments.unitary(ControlVector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(SingleQubitProblem(identity, 0), std::invalid_argument);
}

TEST_CASE("single-qubit propagator matches the series oracle on random controls") {
  std::mt19937_64 rng(17);
  const SingleQubitProblem problem(haar_random_unitary(2, rng), 10);
  const ComplexMatrix x = pauli(PauliAxis::X, 0, 1).matrix();
  const ComplexMatrix z = pauli(PauliAxis::Z, 0, 1).matrix();
  for (int rep = 0; rep < 5; ++rep) {
    const ControlVector c = random_controls(10, rng);
    std::vector<ComplexMatrix> segments;
    for (int j = 0; j < 10; ++j) {
      segments.push_back(z + c[j] * x);
    }
    CHECK(max_abs_diff(problem.unitary(c).matrix(), series_propagator(segments, 1.0)) <
          1e-9);
  }
}

TEST_CASE("cnot problem drift structure") {
  // J = 0 decouples the qubits into local Z rotations.
  CnotProblem decoupled(cnot_gate(), 10, 1.0, -1.0, 0.0, 1.0);
  const ComplexMatrix u = decoupled.unitary(ControlVector::Zero(40)).matrix();
  const ComplexMatrix z = pauli(PauliAxis::Z, 0, 1).matrix();
  // 60 series terms: the exponent argument is q*dt = 10, where 40 terms only
  // reach ~1e-8.
  const ComplexMatrix expected =
      kron(test::taylor_expm(1.0 * z, 10.0, 60), test::taylor_expm(-1.0 * z, 10.0, 60));
  CHECK(max_abs_diff(u, expected) < 1e-9);

  // Pure exchange, single segment.
  CnotProblem exchange_only(cnot_gate(), 1, 0.0, 0.0, 0.1, 1.0);
  const ComplexMatrix x1 = pauli(PauliAxis::X, 0, 2).matrix();
  const ComplexMatrix x2 = pauli(PauliAxis::X, 1, 2).matrix();
  const ComplexMatrix y1 = pauli(PauliAxis::Y, 0, 2).matrix();
  const ComplexMatrix y2 = pauli(PauliAxis::Y, 1, 2).matrix();
  const ComplexMatrix z1 = pauli(PauliAxis::Z, 0, 2).matrix();
  const ComplexMatrix z2 = pauli(PauliAxis::Z, 1, 2).matrix();
  const ComplexMatrix heisenberg = 0.05 * (x1 * x2 + y1 * y2 + z1 * z2);
  CHECK(max_abs_diff(exchange_only.unitary(ControlVector::Zero(4)).matrix(),
                     test::taylor_expm(heisenberg, 1.0)) < 1e-12);
}

TEST_CASE("cnot propagator matches the series oracle on random controls") {
  std::mt19937_64 rng(19);
  const CnotProblem problem;
  const ComplexMatrix x1 = pauli(PauliAxis::X, 0, 2).matrix();
  const ComplexMatrix x2 = pauli(PauliAxis::X, 1, 2).matrix();
  const ComplexMatrix y1 = pauli(PauliAxis::Y, 0, 2).matrix();
  const ComplexMatrix y2 = pauli(PauliAxis::Y, 1, 2).matrix();
  const ComplexMatrix drift = problem.drift().matrix();
  const int q = problem.segments();
  for (int rep = 0; rep < 3; ++rep) {
    const ControlVector c = random_controls(4 * q, rng);
    std::vector<ComplexMatrix> segments;
    for (int j = 0; j < q; ++j) {
      segments.push_back(drift + c[j] * x1 + c[q + j] * x2 + c[2 * q + j] * y1 +
                         c[3 * q + j] * y2);
    }
    CHECK(max_abs_diff(problem.unitary(c).matrix(), series_propagator(segments, 1.0)) <
          1e-9);
  }
}

TEST_CASE("cnot control layout packs and unpacks channel-by-channel") {
  std::mt19937_64 rng(23);
  const CnotProblem problem;
  const ControlVector packed = random_controls(40, rng);
  const auto channels = problem.unpack_controls(packed);
  REQUIRE(channels.size() == 4);
  for (int ch = 0; ch < 4; ++ch) {
    for (int j = 0; j < 10; ++j) {
      CHECK(channels[ch][j] == packed[ch * 10 + j]);
    }
  }
  const ControlVector repacked = problem.pack_controls(channels);
  CHECK((repacked - packed).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("true fidelity: self-target, zero-trace target, range") {
  std::mt19937_64 rng(29);

  // Realizable-target consistency: a target built from known controls is hit
  // exactly at those controls.
  SingleQubitProblem scaffold(UnitaryMatrix{ComplexMatrix::Identity(2, 2)}, 10);
  const ControlVector c_star = random_controls(10, rng);
  SingleQubitProblem realizable(scaffold.unitary(c_star), 10);
  CHECK(realizable.fidelity(c_star) > 1.0 - 1e-10);

  // Tr(X . diagonal) = 0, so a zero control vector scores exactly 0 against X.
  const ComplexMatrix x = pauli(PauliAxis::X, 0, 1).matrix();
  SingleQubitProblem against_x(UnitaryMatrix{x}, 10);
  CHECK(against_x.fidelity(ControlVector::Zero(10)) == 0.0);

  // Two-step recomputation of the drift-only C-NOT fidelity.
  const CnotProblem cnot;
  const double f = cnot.fidelity(ControlVector::Zero(40));
  CHECK(f >= 0.0);
  CHECK(f <= 1.0);
  const ComplexMatrix u = cnot.unitary(ControlVector::Zero(40)).matrix();
  const Complex overlap = (cnot_gate().matrix().adjoint() * u).trace();
  CHECK(f == doctest::Approx(std::norm(overlap) / 16.0).epsilon(1e-12));

  for (int rep = 0; rep < 10; ++rep) {
    const double value = realizable.fidelity(random_controls(10, rng, 2.0));
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
  }
}

TEST_CASE("random drift perturbations have exact norm and GUE statistics") {
  std::mt19937_64 rng(31);
  for (const double norm : {1e-2, 0.3}) {
    const DriftPerturbation delta = random_drift_perturbation(4, norm, rng);
    CHECK(std::abs(spectral_norm(delta.operator_) - norm) < 1e-12);
    const ComplexMatrix h = delta.operator_.matrix();
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK_THROWS_AS(random_drift_perturbation(2, 0.0, rng), std::invalid_argument);

  // Unitary invariance: the mean squared overlap of eigenvectors with a fixed
  // basis vector is 1/d, matched against a direct GUE sampler.
  const Eigen::Index d = 4;
  const int draws = 1000;
  auto mean_overlap = [&](auto&& sampler) {
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sampler());
      sum += std::norm(solver.eigenvectors()(0, 0));
    }
    return sum / draws;
  };
  std::mt19937_64 rng_ours(33);
  std::mt19937_64 rng_ref(34);
  const double ours = mean_overlap(
      [&] { return random_drift_perturbation(d, 1.0, rng_ours).operator_.matrix(); });
  const double reference = mean_overlap([&] { return test::gue_sample(d, rng_ref); });
  // Var |v|^2 = 3/80 for d = 4; 3 sigma over 1000 draws is ~0.019.
  CHECK(std::abs(ours - 0.25) < 0.02);
  CHECK(std::abs(ours - reference) < 0.03);
}

TEST_CASE("perturbed problems shift the drift, not the target") {
  std::mt19937_64 rng(37);
  const SingleQubitProblem base(haar_random_unitary(2, rng), 10);
  const ControlVector c = random_controls(10, rng);

  // Zero perturbation leaves the propagator untouched.
  const DriftPerturbation none{HermitianOperator{ComplexMatrix::Zero(2, 2)}, 0.0};
  const SingleQubitProblem same = perturbed_problem(base, none);
  CHECK(max_abs_diff(same.unitary(c).matrix(), base.unitary(c).matrix()) == 0.0);
  CHECK(max_abs_diff(same.target().matrix(), base.target().matrix()) == 0.0);

  const DriftPerturbation delta = random_drift_perturbation(2, 1e-2, rng);
  const SingleQubitProblem shifted = perturbed_problem(base, delta);
  CHECK(std::abs(shifted.fidelity(c) - base.fidelity(c)) > 0.0);

  // First-order response: the fidelity difference scales linearly with the
  // perturbation norm for one fixed direction.
  const ComplexMatrix direction = delta.operator_.matrix() / delta.norm;
  auto difference_at = [&](double norm) {
    const DriftPerturbation scaled{HermitianOperator{norm * direction}, norm};
    return std::abs(perturbed_problem(base, scaled).fidelity(c) - base.fidelity(c));
  };
  const double d4 = difference_at(1e-4);
  const double d3 = difference_at(1e-3);
  const double d2 = difference_at(1e-2);
  CHECK(d3 / d4 == doctest::Approx(10.0).epsilon(0.15));
  CHECK(d2 / d3 == doctest::Approx(10.0).epsilon(0.15));

  CHECK_THROWS_AS(perturbed_problem(base, DriftPerturbation{
                                              HermitianOperator{ComplexMatrix::Zero(4, 4)},
                                              0.0}),
                  std::invalid_argument);
}
