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

#include "insitu/problems.hpp"

#include <stdexcept>

namespace insitu {

namespace {

HermitianOperator heisenberg_drift(double delta1, double delta2, double coupling) {
  const ComplexMatrix z1 = pauli(PauliAxis::Z, 0, 2).matrix();
  const ComplexMatrix z2 = pauli(PauliAxis::Z, 1, 2).matrix();
  const ComplexMatrix x1 = pauli(PauliAxis::X, 0, 2).matrix();
  const ComplexMatrix x2 = pauli(PauliAxis::X, 1, 2).matrix();
  const ComplexMatrix y1 = pauli(PauliAxis::Y, 0, 2).matrix();
  const ComplexMatrix y2 = pauli(PauliAxis::Y, 1, 2).matrix();
  return HermitianOperator(delta1 * z1 + delta2 * z2 +
                           0.5 * coupling * (x1 * x2 + y1 * y2 + z1 * z2));
}

}  // namespace

double ControlProblem::fidelity(const ControlVector& controls) const {
  return gate_fidelity(unitary(controls), target());
}

UnitaryMatrix cnot_gate() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return UnitaryMatrix(std::move(m));
}

SingleQubitProblem::SingleQubitProblem(UnitaryMatrix target, int segments, double omega0,
                                       double dt)
    : SingleQubitProblem(std::move(target),
                         HermitianOperator(omega0 * pauli(PauliAxis::Z, 0, 1).matrix()),
                         segments, omega0, dt) {}

SingleQubitProblem::SingleQubitProblem(UnitaryMatrix target, HermitianOperator drift,
                                       int segments, double omega0, double dt)
    : target_(std::move(target)),
      drift_(std::move(drift)),
      segments_(segments),
      omega0_(omega0),
      dt_(dt) {
  if (segments_ < 1) {
    throw std::invalid_argument("SingleQubitProblem: segment count must be >= 1");
  }
  if (target_.dimension() != 2 || drift_.dimension() != 2) {
    throw std::invalid_argument("SingleQubitProblem: target and drift must be 2x2");
  }
}

UnitaryMatrix SingleQubitProblem::unitary(const ControlVector& controls) const {
  if (controls.size() != segments_) {
    throw std::invalid_argument("SingleQubitProblem: control vector length mismatch");
  }
  const ComplexMatrix x = pauli(PauliAxis::X, 0, 1).matrix();
  std::vector<HermitianOperator> segments;
  segments.reserve(segments_);
  for (int j = 0; j < segments_; ++j) {
    segments.emplace_back(drift_.matrix() + controls[j] * x);
  }
  return propagate(segments, dt_);
}

CnotProblem::CnotProblem(int segments, double delta1, double delta2, double coupling,
                         double dt)
    : CnotProblem(cnot_gate(), segments, delta1, delta2, coupling, dt) {}

CnotProblem::CnotProblem(UnitaryMatrix target, int segments, double delta1, double delta2,
                         double coupling, double dt)
    : target_(std::move(target)),
      segments_(segments),
      delta1_(delta1),
      delta2_(delta2),
      coupling_(coupling),
      dt_(dt),
      drift_(heisenberg_drift(delta1, delta2, coupling)) {
  if (segments_ < 1) {
    throw std::invalid_argument("CnotProblem: segment count must be >= 1");
  }
  if (target_.dimension() != 4) {
    throw std::invalid_argument("CnotProblem: target must be 4x4");
  }
}

UnitaryMatrix CnotProblem::unitary(const ControlVector& controls) const {
  if (controls.size() != control_dim()) {
    throw std::invalid_argument("CnotProblem: control vector length mismatch");
  }
  const ComplexMatrix x1 = pauli(PauliAxis::X, 0, 2).matrix();
  const ComplexMatrix x2 = pauli(PauliAxis::X, 1, 2).matrix();
  const ComplexMatrix y1 = pauli(PauliAxis::Y, 0, 2).matrix();
  const ComplexMatrix y2 = pauli(PauliAxis::Y, 1, 2).matrix();
  const int q = segments_;
  std::vector<HermitianOperator> segments;
  segments.reserve(q);
  for (int j = 0; j < q; ++j) {
    segments.emplace_back(drift_.matrix() + controls[j] * x1 + controls[q + j] * x2 +
                          controls[2 * q + j] * y1 + controls[3 * q + j] * y2);
  }
  return propagate(segments, dt_);
}

std::vector<ControlVector> CnotProblem::unpack_controls(const ControlVector& controls) const {
  if (controls.size() != control_dim()) {
    throw std::invalid_argument("CnotProblem: control vector length mismatch");
  }
  std::vector<ControlVector> channels;
  channels.reserve(4);
  for (int ch = 0; ch < 4; ++ch) {
    channels.push_back(controls.segment(ch * segments_, segments_));
  }
  return channels;
}

ControlVector CnotProblem::pack_controls(const std::vector<ControlVector>& channels) const {
  if (channels.size() != 4) {
    throw std::invalid_argument("CnotProblem: expected 4 control channels");
  }
  ControlVector controls(control_dim());
  for (int ch = 0; ch < 4; ++ch) {
    if (channels[ch].size() != segments_) {
      throw std::invalid_argument("CnotProblem: channel length mismatch");
    }
    controls.segment(ch * segments_, segments_) = channels[ch];
  }
  return controls;
}

DriftPerturbation random_drift_perturbation(Eigen::Index d, double norm,
                                            std::mt19937_64& rng) {
  if (!(norm > 0.0)) {
    throw std::invalid_argument("random_drift_perturbation: norm must be positive");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      a(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  ComplexMatrix h = 0.5 * (a + a.adjoint().eval());
  const double current = spectral_norm(HermitianOperator(h));
  if (current == 0.0) {
    // Vanishing draw has probability zero; retry rather than divide by it.
    return random_drift_perturbation(d, norm, rng);
  }
  h *= norm / current;
  return DriftPerturbation{HermitianOperator(std::move(h)), norm};
}

SingleQubitProblem perturbed_problem(const SingleQubitProblem& problem,
                                     const DriftPerturbation& perturbation) {
  if (perturbation.operator_.dimension() != 2) {
    throw std::invalid_argument("perturbed_problem: perturbation dimension mismatch");
  }
  return SingleQubitProblem(problem.target(), problem.drift() + perturbation.operator_,
                            problem.segments(), problem.omega0(), problem.dt());
}

}  // namespace insitu
