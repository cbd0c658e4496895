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

#ifndef INSITU_PROBLEMS_HPP
#define INSITU_PROBLEMS_HPP

#include <random>
#include <vector>

#include "insitu/quantum.hpp"

namespace insitu {

/// A point in the p-dimensional control space.
using ControlVector = Eigen::VectorXd;

/// A control problem maps a control vector to an implemented unitary; the
/// objective is the gate fidelity of that unitary against a fixed target.
/// Problems are immutable values, safe to share across concurrent trials.
class ControlProblem {
 public:
  virtual ~ControlProblem() = default;

  virtual int control_dim() const = 0;
  virtual UnitaryMatrix unitary(const ControlVector& controls) const = 0;
  virtual const UnitaryMatrix& target() const = 0;

  /// True (noiseless) objective: gate_fidelity(unitary(controls), target()).
  virtual double fidelity(const ControlVector& controls) const;
};

/// The standard 4x4 C-NOT gate (control on qubit 0, the leftmost factor).
UnitaryMatrix cnot_gate();

/// Single qubit under drift + piecewise-constant transverse control:
/// segment j evolves under drift + c_j X for duration dt.
class SingleQubitProblem : public ControlProblem {
 public:
  /// Drift defaults to omega0 * Z.
  SingleQubitProblem(UnitaryMatrix target, int segments = 10, double omega0 = 1.0,
                     double dt = 1.0);
  /// Explicit drift operator (used for model-mismatch variants).
  SingleQubitProblem(UnitaryMatrix target, HermitianOperator drift, int segments,
                     double omega0, double dt);

  int control_dim() const override { return segments_; }
  UnitaryMatrix unitary(const ControlVector& controls) const override;
  const UnitaryMatrix& target() const override { return target_; }

  int segments() const { return segments_; }
  double omega0() const { return omega0_; }
  double dt() const { return dt_; }
  const HermitianOperator& drift() const { return drift_; }

 private:
  UnitaryMatrix target_;
  HermitianOperator drift_;
  int segments_;
  double omega0_;
  double dt_;
};

/// Two qubits with Zeeman drift plus Heisenberg exchange, controlled through
/// piecewise-constant transverse fields on both qubits. The control vector
/// has dimension p = 4q, laid out channel-by-channel:
/// (x1[1..q], x2[1..q], y1[1..q], y2[1..q]).
class CnotProblem : public ControlProblem {
 public:
  explicit CnotProblem(int segments = 10, double delta1 = 1.0, double delta2 = -1.0,
                       double coupling = 0.1, double dt = 1.0);
  CnotProblem(UnitaryMatrix target, int segments, double delta1, double delta2,
              double coupling, double dt);

  int control_dim() const override { return 4 * segments_; }
  UnitaryMatrix unitary(const ControlVector& controls) const override;
  const UnitaryMatrix& target() const override { return target_; }

  int segments() const { return segments_; }
  double delta1() const { return delta1_; }
  double delta2() const { return delta2_; }
  double coupling() const { return coupling_; }
  double dt() const { return dt_; }
  const HermitianOperator& drift() const { return drift_; }

  /// Split a packed control vector into the four q-length channels
  /// (x1, x2, y1, y2); inverse of pack_controls.
  std::vector<ControlVector> unpack_controls(const ControlVector& controls) const;
  ControlVector pack_controls(const std::vector<ControlVector>& channels) const;

 private:
  UnitaryMatrix target_;
  int segments_;
  double delta1_;
  double delta2_;
  double coupling_;
  double dt_;
  HermitianOperator drift_;
};

/// A random Hermitian drift error with exactly the requested spectral norm.
struct DriftPerturbation {
  HermitianOperator operator_;
  double norm;
};

/// Samples a GUE-style random Hermitian matrix (complex Gaussian upper
/// triangle, real Gaussian diagonal, Hermitized) rescaled so its spectral
/// norm equals `norm` exactly.
DriftPerturbation random_drift_perturbation(Eigen::Index d, double norm,
                                            std::mt19937_64& rng);

/// The same problem with drift replaced by drift + perturbation; the target
/// is unchanged.
SingleQubitProblem perturbed_problem(const SingleQubitProblem& problem,
                                     const DriftPerturbation& perturbation);

}  // namespace insitu

#endif
