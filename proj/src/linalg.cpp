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

#include "pulsesim/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

#include "pulsesim/errors.hpp"

namespace pulsesim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Makes the largest-magnitude component of each column real and positive.
// Near-ties (within 1e-9 relative) resolve to the lowest index.
void fix_phases(ComplexMatrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    const double peak = vectors.col(c).cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    Index pivot = 0;
    for (Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) >= peak * (1.0 - 1e-9)) {
        pivot = r;
        break;
      }
    }
    const Complex z = vectors(pivot, c);
    vectors.col(c) *= std::conj(z) / std::abs(z);
  }
}

// Within groups of (numerically) equal eigenvalues, order columns by the first
// component whose magnitude differs, larger magnitude first.
void order_degenerate(RealVector& energies, ComplexMatrix& vectors) {
  const Index n = energies.size();
  const double scale = std::max(1.0, energies.cwiseAbs().maxCoeff());
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && energies(stop) - energies(stop - 1) <= 1e-12 * scale) ++stop;
    if (stop - start > 1) {
      std::vector<Index> order(stop - start);
      std::iota(order.begin(), order.end(), start);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        for (Index r = 0; r < vectors.rows(); ++r) {
          const double ma = std::abs(vectors(r, a));
          const double mb = std::abs(vectors(r, b));
          if (std::abs(ma - mb) > 1e-12) return ma > mb;
        }
        return false;
      });
      const ComplexMatrix block = vectors.middleCols(start, stop - start);
      const RealVector values = energies.segment(start, stop - start);
      for (Index k = 0; k < stop - start; ++k) {
        vectors.col(start + k) = block.col(order[k] - start);
        energies(start + k) = values(order[k] - start);
      }
    }
    start = stop;
  }
}

}  // namespace

HermitianOperator::HermitianOperator(const ComplexMatrix& matrix) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols()) {
    throw InvalidArgument("hermitian operator must be square and non-empty");
  }
  if (!matrix.allFinite()) throw NumericalError("non-finite matrix entry");
  const double scale = matrix.cwiseAbs().maxCoeff();
  const double skew = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (skew > 1e-10 * scale) throw InvalidArgument("not hermitian");
  matrix_ = 0.5 * (matrix + matrix.adjoint());
}

ComplexMatrix embed_operator(const ComplexMatrix& op, Slot slot, const Dims& dims) {
  for (Index d : dims) {
    if (d <= 0) throw InvalidArgument("embed dimension: non-positive subsystem dimension");
  }
  const auto s = static_cast<std::size_t>(slot);
  if (op.rows() != dims[s] || op.cols() != dims[s]) {
    throw InvalidArgument("embed dimension: operator does not match subsystem");
  }
  std::array<ComplexMatrix, 3> factors;
  for (std::size_t k = 0; k < 3; ++k) {
    factors[k] = (k == s) ? op : ComplexMatrix::Identity(dims[k], dims[k]);
  }
  const ComplexMatrix left = Eigen::kroneckerProduct(factors[0], factors[1]);
  return Eigen::kroneckerProduct(left, factors[2]);
}

Spectrum eigh(const HermitianOperator& h) {
  const auto n = static_cast<lapack_int>(h.dim());
  Spectrum out;
  out.vectors = h.matrix();
  out.energies.resize(n);
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
      out.energies.data());
  if (info != 0 || !out.energies.allFinite()) throw NumericalError("eigensolve failed");
  fix_phases(out.vectors);
  order_degenerate(out.energies, out.vectors);
  return out;
}

ComplexMatrix unitary_from_spectrum(const Spectrum& spectrum, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  ComplexVector phases(spectrum.energies.size());
  for (Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -kTwoPi * dt * spectrum.energies(k));
  }
  return spectrum.vectors * phases.asDiagonal() * spectrum.vectors.adjoint();
}

ComplexMatrix unitary_step(const HermitianOperator& h, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  return unitary_from_spectrum(eigh(h), dt);
}

ComplexMatrix lowdin_orthonormalize(const ComplexMatrix& v) {
  if (v.cols() == 0 || v.rows() < v.cols()) {
    throw InvalidArgument("lowdin: need at least as many rows as columns");
  }
  const Spectrum overlap = eigh(HermitianOperator(v.adjoint() * v));
  // Singular values of v are the square roots of the overlap eigenvalues.
  if (overlap.energies(0) <= 1e-16) {
    throw CalibrationError("degenerate computational projection");
  }
  const RealVector inv_sqrt = overlap.energies.cwiseSqrt().cwiseInverse();
  const ComplexMatrix s_inv_half =
      overlap.vectors * inv_sqrt.cast<Complex>().asDiagonal() * overlap.vectors.adjoint();
  return v * s_inv_half;
}

double unitarity_defect(const ComplexMatrix& u) {
  const ComplexMatrix gram = u.adjoint() * u;
  return (gram - ComplexMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

SpectralBounds gershgorin_bounds(const SparseComplexMatrix& h) {
  const Index n = h.rows();
  RealVector diag = RealVector::Zero(n);
  RealVector radius = RealVector::Zero(n);
  for (Index c = 0; c < h.outerSize(); ++c) {
    for (SparseComplexMatrix::InnerIterator it(h, c); it; ++it) {
      if (it.row() == it.col()) {
        diag(it.row()) = it.value().real();
      } else {
        radius(it.row()) += std::abs(it.value());
      }
    }
  }
  return {(diag - radius).minCoeff(), (diag + radius).maxCoeff()};
}

double max_row_sum(const SparseComplexMatrix& h) {
  RealVector sums = RealVector::Zero(h.rows());
  for (Index c = 0; c < h.outerSize(); ++c) {
    for (SparseComplexMatrix::InnerIterator it(h, c); it; ++it) sums(it.row()) += std::abs(it.value());
  }
  return sums.size() ? sums.maxCoeff() : 0.0;
}

ComplexVector expm_action(const LinearAction& h, const ComplexVector& psi, double dt,
                          const SpectralBounds& bounds) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double center = 0.5 * (bounds.upper + bounds.lower);
  const double radius = std::max(0.5 * (bounds.upper - bounds.lower), 1e-12);
  const double x = kTwoPi * dt * radius;

  // T_k of the shifted, rescaled operator (H - center) / radius.
  ComplexVector scratch(psi.size());
  auto apply_scaled = [&](const ComplexVector& v, ComplexVector& out) {
    h(v, scratch);
    out = (scratch - center * v) / radius;
  };

  ComplexVector prev = psi;
  ComplexVector curr(psi.size());
  ComplexVector next(psi.size());
  apply_scaled(psi, curr);
  ComplexVector sum = std::cyl_bessel_j(0.0, x) * psi;
  Complex minus_i_pow(0.0, -1.0);
  const int max_terms = static_cast<int>(x) + 80;
  for (int k = 1; k < max_terms; ++k) {
    const double coeff = std::cyl_bessel_j(static_cast<double>(k), x);
    sum += (2.0 * coeff) * minus_i_pow * curr;
    if (k > x && std::abs(coeff) < 1e-16) break;
    apply_scaled(curr, next);
    next = 2.0 * next - prev;
    prev.swap(curr);
    curr.swap(next);
    minus_i_pow *= Complex(0.0, -1.0);
  }
  return std::polar(1.0, -kTwoPi * dt * center) * sum;
}

ComplexVector expm_action(const SparseComplexMatrix& h, const ComplexVector& psi,
                          double dt, const SpectralBounds& bounds) {
  return expm_action(
      [&h](const ComplexVector& v, ComplexVector& out) { out.noalias() = h * v; }, psi, dt,
      bounds);
}

}  // namespace pulsesim
