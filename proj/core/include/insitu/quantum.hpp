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

#ifndef INSITU_QUANTUM_HPP
#define INSITU_QUANTUM_HPP

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace insitu {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Entrywise tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTol = 1e-12;
/// Max entrywise tolerance on |U^dag U - I| for accepting a matrix as unitary.
inline constexpr double kUnitaryTol = 1e-10;
/// Fidelity values above 1 by at most this much are clamped; larger is an error.
inline constexpr double kFidelityRoundoffTol = 1e-12;

/// A square complex matrix constrained to satisfy A = A^dag (checked at
/// construction, entrywise within kHermitianTol).
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix matrix);

  Eigen::Index dimension() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator*(double scale) const;

 private:
  ComplexMatrix matrix_;
};

inline HermitianOperator operator*(double scale, const HermitianOperator& h) {
  return h * scale;
}

/// A square complex matrix constrained to satisfy U^dag U = I (checked at
/// construction, max entrywise deviation within kUnitaryTol).
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(ComplexMatrix matrix);

  Eigen::Index dimension() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

enum class PauliAxis { X, Y, Z };

/// Kronecker product a (x) b. Index 0 of `a` is the most significant factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Single-qubit Pauli operator acting on `qubit_index` of an `n_qubits`
/// register (identity on all other qubits). Qubit 0 is the leftmost tensor
/// factor. Supports n_qubits <= 2.
HermitianOperator pauli(PauliAxis axis, int qubit_index, int n_qubits);

/// exp(-i H t) via Hermitian eigendecomposition. The 2x2 case uses the
/// closed-form Pauli decomposition; larger dimensions use an iterative
/// self-adjoint solver. The result is unitary to roundoff either way.
UnitaryMatrix expm_hermitian(const HermitianOperator& h, double t);

/// Time-ordered product of piecewise-constant segment propagators:
/// segments[0] acts first, i.e. it is the rightmost factor of
/// exp(-i H_p dt) ... exp(-i H_1 dt).
UnitaryMatrix propagate(const std::vector<HermitianOperator>& segments, double dt);

/// Gate fidelity |Tr(V^dag U)|^2 / d^2, clamped to [0, 1] when roundoff
/// pushes the value above 1 by at most kFidelityRoundoffTol.
double gate_fidelity(const UnitaryMatrix& u, const UnitaryMatrix& v);

/// Haar-distributed random unitary: QR decomposition of a complex Ginibre
/// matrix with the R-diagonal phase correction.
UnitaryMatrix haar_random_unitary(Eigen::Index d, std::mt19937_64& rng);

/// Largest absolute eigenvalue.
double spectral_norm(const HermitianOperator& h);

}  // namespace insitu

#endif
