// Copyright 2026 The pulsesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <functional>

namespace pulsesim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex>;
using Index = Eigen::Index;

/// Subsystem positions in the product space |q1, c, q0>. q0 is the least
/// significant factor.
enum class Slot : int { kQ1 = 0, kCoupler = 1, kQ0 = 2 };

using Dims = std::array<Index, 3>;

inline Index total_dim(const Dims& dims) { return dims[0] * dims[1] * dims[2]; }

/// Dense Hermitian matrix. Energies are in GHz, times in ns.
///
/// Construction rejects matrices that are not square, contain non-finite
/// entries, or deviate from Hermiticity by more than 1e-10 of their max-norm.
/// The stored matrix is the exact Hermitian part of the input.
class HermitianOperator {
 public:
  explicit HermitianOperator(const ComplexMatrix& matrix);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
};

/// Eigendecomposition with ascending energies; column k of `vectors` pairs
/// with energies[k]. Each column has its largest-magnitude component real and
/// positive.
struct Spectrum {
  RealVector energies;
  ComplexMatrix vectors;
};

/// Places `op` at `slot` in I (x) ... (x) op (x) ... (x) I.
ComplexMatrix embed_operator(const ComplexMatrix& op, Slot slot, const Dims& dims);

Spectrum eigh(const HermitianOperator& h);

/// exp(-i 2 pi dt H) built from the eigendecomposition of `h`.
ComplexMatrix unitary_step(const HermitianOperator& h, double dt);
ComplexMatrix unitary_from_spectrum(const Spectrum& spectrum, double dt);

/// Symmetric orthogonalization W = V (V^dagger V)^(-1/2).
ComplexMatrix lowdin_orthonormalize(const ComplexMatrix& v);

/// max_ij |(U^dagger U - I)_ij|
double unitarity_defect(const ComplexMatrix& u);

struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;
};

SpectralBounds gershgorin_bounds(const SparseComplexMatrix& h);

/// exp(-i 2 pi dt H) psi by Chebyshev expansion, for Hermitian `h` whose
/// spectrum lies inside `bounds`. The series is truncated once the Bessel
/// coefficients fall below 1e-16, so the result matches the eigenbasis route
/// to roundoff.
/// Upper bound on the spectral norm of a Hermitian matrix.
double max_row_sum(const SparseComplexMatrix& h);

/// out = H v, for matrix-free Hamiltonians.
using LinearAction = std::function<void(const ComplexVector& v, ComplexVector& out)>;

/// exp(-i 2 pi dt H) psi by a Chebyshev expansion; bounds must enclose the spectrum.
ComplexVector expm_action(const LinearAction& h, const ComplexVector& psi, double dt,
                          const SpectralBounds& bounds);
ComplexVector expm_action(const SparseComplexMatrix& h, const ComplexVector& psi,
                          double dt, const SpectralBounds& bounds);

}  // namespace pulsesim
