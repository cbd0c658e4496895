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

#include "insitu/quantum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace insitu {

namespace {

constexpr Complex kImag{0.0, 1.0};

void check_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and nonempty");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
  }
}

// exp(-i h t) for a validated Hermitian matrix, skipping re-validation.
ComplexMatrix expm_raw(const ComplexMatrix& h, double t) {
  if (h.rows() == 1) {
    ComplexMatrix u(1, 1);
    u(0, 0) = std::exp(-kImag * (h(0, 0).real() * t));
    return u;
  }
  if (h.rows() == 2) {
    // H = a0 I + ax X + ay Y + az Z with real coefficients; the exponential
    // is the closed-form eigen-rotation
    //   exp(-i H t) = e^{-i a0 t} (cos(r t) I - i sin(r t) (a.sigma)/r).
    const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double az = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double ax = h(0, 1).real();
    const double ay = -h(0, 1).imag();
    const double r = std::sqrt(ax * ax + ay * ay + az * az);
    const Complex phase = std::exp(-kImag * (a0 * t));
    double c = 1.0;
    double s_over_r = t;  // lim_{r->0} sin(r t)/r
    if (r > 0.0) {
      c = std::cos(r * t);
      s_over_r = std::sin(r * t) / r;
    }
    ComplexMatrix u(2, 2);
    const Complex ms = -kImag * s_over_r;
    u(0, 0) = phase * (c + ms * az);
    u(0, 1) = phase * (ms * Complex(ax, -ay));
    u(1, 0) = phase * (ms * Complex(ax, ay));
    u(1, 1) = phase * (c - ms * az);
    return u;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  const Eigen::VectorXcd phases =
      (-kImag * t * solver.eigenvalues().array().cast<Complex>()).exp().matrix();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  check_square_finite(matrix_, "HermitianOperator");
  const double deviation = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (deviation > kHermitianTol) {
    throw std::invalid_argument("HermitianOperator: symmetry check failed, max |A - A^dag| = " +
                                std::to_string(deviation));
  }
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (other.dimension() != dimension()) {
    throw std::invalid_argument("HermitianOperator: dimension mismatch in sum");
  }
  return HermitianOperator(matrix_ + other.matrix_);
}

HermitianOperator HermitianOperator::operator*(double scale) const {
  return HermitianOperator(scale * matrix_);
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  check_square_finite(matrix_, "UnitaryMatrix");
  const Eigen::Index d = matrix_.rows();
  const double deviation =
      (matrix_.adjoint() * matrix_ - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (deviation > kUnitaryTol) {
    throw std::invalid_argument("UnitaryMatrix: unitarity check failed, max |U^dag U - I| = " +
                                std::to_string(deviation));
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator pauli(PauliAxis axis, int qubit_index, int n_qubits) {
  if (n_qubits < 1 || n_qubits > 2) {
    throw std::invalid_argument("pauli: n_qubits must be 1 or 2");
  }
  if (qubit_index < 0 || qubit_index >= n_qubits) {
    throw std::invalid_argument("pauli: qubit_index out of range");
  }
  ComplexMatrix sigma(2, 2);
  switch (axis) {
    case PauliAxis::X:
      sigma << 0, 1, 1, 0;
      break;
    case PauliAxis::Y:
      sigma << 0, -kImag, kImag, 0;
      break;
    case PauliAxis::Z:
      sigma << 1, 0, 0, -1;
      break;
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    out = kron(out, q == qubit_index ? sigma : ComplexMatrix::Identity(2, 2));
  }
  return HermitianOperator(std::move(out));
}

UnitaryMatrix expm_hermitian(const HermitianOperator& h, double t) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("expm_hermitian: duration must be finite");
  }
  return UnitaryMatrix(expm_raw(h.matrix(), t));
}

UnitaryMatrix propagate(const std::vector<HermitianOperator>& segments, double dt) {
  if (segments.empty()) {
    throw std::invalid_argument("propagate: segment list is empty");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("propagate: dt must be positive and finite");
  }
  const Eigen::Index d = segments.front().dimension();
  ComplexMatrix u = expm_raw(segments.front().matrix(), dt);
  for (std::size_t j = 1; j < segments.size(); ++j) {
    if (segments[j].dimension() != d) {
      throw std::invalid_argument("propagate: mismatched segment dimensions");
    }
    u = expm_raw(segments[j].matrix(), dt) * u;
  }
  return UnitaryMatrix(std::move(u));
}

double gate_fidelity(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  const Eigen::Index d = u.dimension();
  if (v.dimension() != d) {
    throw std::invalid_argument("gate_fidelity: dimension mismatch");
  }
  const Complex overlap = (v.matrix().adjoint() * u.matrix()).trace();
  const double f = std::norm(overlap) / static_cast<double>(d * d);
  if (f > 1.0 + kFidelityRoundoffTol) {
    throw std::domain_error("gate_fidelity: value exceeds 1 beyond roundoff: " +
                            std::to_string(f));
  }
  return std::min(f, 1.0);
}

UnitaryMatrix haar_random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  if (d < 1) {
    throw std::invalid_argument("haar_random_unitary: dimension must be >= 1");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix ginibre(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      ginibre(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the gauge: without normalizing R's diagonal phases the QR output is
  // not Haar distributed.
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= (mag > 0.0 ? rjj / mag : Complex(1.0, 0.0));
  }
  return UnitaryMatrix(std::move(q));
}

double spectral_norm(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace insitu
