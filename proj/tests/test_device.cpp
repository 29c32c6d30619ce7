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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "pulsesim/device.hpp"
#include "pulsesim/errors.hpp"

namespace pulsesim {
namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

HarmonicFit constant(double v) {
  HarmonicFit f;
  f.c0 = v;
  return f;
}

ModelCurves constant_curves(std::array<double, 2> omega_tilde, double j, double zeta,
                            std::array<double, 2> omega, std::array<double, 2> alpha) {
  EffectiveCurves e{{constant(omega_tilde[0]), constant(omega_tilde[1])}, constant(j), constant(zeta)};
  DuffingCurves d{{constant(omega[0]), constant(omega[1])}, {constant(alpha[0]), constant(alpha[1])}};
  return {e, d};
}

RealVector spectrum_of(const ModelHamiltonian& m) { return eigh(m.drift).energies; }

TEST(DeviceParams, DefaultsReproduceDeviceTable) {
  const DeviceParams p;
  EXPECT_EQ(p.ej_max[1], 28.48);
  EXPECT_EQ(p.ej_max[0], 42.34);
  EXPECT_EQ(p.ec[1], 0.317);
  EXPECT_EQ(p.ec[0], 0.297);
  EXPECT_EQ(p.omega_c, 6.902);
  EXPECT_EQ(p.kappa, 0.001);
  EXPECT_EQ(p.g[1], 0.183);
  EXPECT_EQ(p.g[0], 0.199);
  EXPECT_TRUE(p.validate().empty());
}

TEST(DeviceParams, ValidationRejectsAndAdvises) {
  DeviceParams p;
  p.d[0] = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = DeviceParams{};
  p.ec[1] = 5.0;  // E_J / E_C below the transmon regime
  EXPECT_FALSE(p.validate().empty());
  TruncationConfig t;
  t.n_q = 22;
  EXPECT_THROW(t.validate(), InvalidArgument);
}

TEST(EjOfFlux, Examples) {
  DeviceParams p;
  EXPECT_EQ(ej_of_flux(p, 1, 0.0), 28.48);
  EXPECT_NEAR(ej_of_flux(p, 1, 0.5), 0.0, 1e-14);
  EXPECT_NEAR(ej_of_flux(p, 1, 0.25), 28.48 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ej_of_flux(p, 1, 0.25), 20.139, 1e-3);
  p.d[1] = 0.3;
  EXPECT_NEAR(ej_of_flux(p, 1, 0.5), 0.3 * 28.48, 1e-12);
}

TEST(TransmonCharge, ZeroJosephsonIsDiagonal) {
  const ChargeBasisTransmon t = transmon_charge_hamiltonian(0.3, 0.0, 0.0, 7);
  const ComplexMatrix& h = t.hamiltonian.matrix();
  EXPECT_EQ(max_abs(h - ComplexMatrix(h.diagonal().asDiagonal())), 0.0);
  const Spectrum s = eigh(t.hamiltonian);
  EXPECT_EQ(s.energies(0), 0.0);
  Index arg = 0;
  s.vectors.col(0).cwiseAbs().maxCoeff(&arg);
  EXPECT_EQ(t.n_hat(arg, arg).real(), 0.0);
}

TEST(TransmonCharge, MatchesSmallBruteForceMatrix) {
  const ChargeBasisTransmon t = transmon_charge_hamiltonian(0.317, 28.48, 0.21, 5);
  EXPECT_LT(max_abs(t.hamiltonian.matrix() - oracle::transmon_matrix(0.317, 28.48, 0.21, 5)), 1e-14);
  for (Index k = 0; k < 5; ++k) EXPECT_EQ(t.n_hat(k, k).real(), static_cast<double>(k - 2));
}

TEST(TransmonCharge, AsymptoticFrequency) {
  const DeviceParams p;
  for (int j : {0, 1}) {
    const double ec = p.ec[static_cast<std::size_t>(j)];
    const double ej = p.ej_max[static_cast<std::size_t>(j)];
    const RealVector e = eigh(transmon_charge_hamiltonian(ec, ej, 0.0, 23).hamiltonian).energies;
    const double asym = std::sqrt(8.0 * ec * ej) - ec;
    EXPECT_NEAR((e(1) - e(0)) / asym, 1.0, 0.02) << "qubit " << j;
  }
}

TEST(TransmonCharge, RejectsEvenDimension) {
  try {
    transmon_charge_hamiltonian(0.3, 20.0, 0.0, 6);
    FAIL() << "expected an error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("charge basis must be symmetric"), std::string::npos);
  }
}

TEST(TruncateToEigenbasis, CommutingCaseStaysDiagonal) {
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  h.diagonal() << 3.0, 0.5, 2.0, 1.0;
  ComplexMatrix n = ComplexMatrix::Zero(4, 4);
  n.diagonal() << 10.0, 20.0, 30.0, 40.0;
  const TruncatedTransmon t = truncate_to_eigenbasis(HermitianOperator(h), n, 3);
  EXPECT_NEAR(t.energies(0), 0.0, 1e-15);
  EXPECT_NEAR(t.energies(1), 0.5, 1e-15);
  EXPECT_NEAR(t.energies(2), 1.5, 1e-15);
  EXPECT_EQ(max_abs(t.n_projected - ComplexMatrix(t.n_projected.diagonal().asDiagonal())), 0.0);
  EXPECT_NEAR(t.n_projected(0, 0).real(), 20.0, 1e-14);
  EXPECT_NEAR(t.n_projected(1, 1).real(), 40.0, 1e-14);
  EXPECT_NEAR(t.n_projected(2, 2).real(), 30.0, 1e-14);
}

TEST(TruncateToEigenbasis, MatchesLargerBasis) {
  const ChargeBasisTransmon t = transmon_charge_hamiltonian(0.317, 28.48, 0.0, 23);
  const TruncatedTransmon r = truncate_to_eigenbasis(t.hamiltonian, t.n_hat, 9);
  const oracle::RVec ref = oracle::jacobi_eigenvalues(oracle::transmon_matrix(0.317, 28.48, 0.0, 41));
  for (Index k = 0; k < 4; ++k) EXPECT_NEAR(r.energies(k), ref(k) - ref(0), 1e-6);
}

TEST(TruncateToEigenbasis, CompleteBasisPreservesTrace) {
  const ChargeBasisTransmon t = transmon_charge_hamiltonian(0.297, 42.34, 0.3, 11);
  const TruncatedTransmon r = truncate_to_eigenbasis(t.hamiltonian, t.n_hat, 11);
  EXPECT_NEAR(std::abs(r.n_projected.trace() - t.n_hat.trace()), 0.0, 1e-9);
}

TEST(BuildHamiltonian, EffectiveDecoupledIsAdditive) {
  const ModelCurves c = constant_curves({5.0, 6.0}, 0.0, 0.0, {5.0, 6.0}, {-0.3, -0.3});
  const ModelHamiltonian m = build_hamiltonian(ModelKind::kEffective, {}, c, {}, 0.1);
  EXPECT_EQ(m.dims, (Dims{2, 1, 2}));
  const ComplexMatrix& h = m.drift.matrix();
  EXPECT_EQ(max_abs(h - ComplexMatrix(h.diagonal().asDiagonal())), 0.0);
  EXPECT_NEAR(h(0, 0).real(), 0.0, 1e-14);
  EXPECT_NEAR(h(1, 1).real(), 5.0, 1e-14);
  EXPECT_NEAR(h(2, 2).real(), 6.0, 1e-14);
  EXPECT_NEAR(h(3, 3).real(), 11.0, 1e-14);
}

TEST(BuildHamiltonian, EffectiveCouplingsEnterAsExpected) {
  const ModelCurves c = constant_curves({5.0, 5.2}, 0.01, -0.002, {5.0, 6.0}, {-0.3, -0.3});
  const ComplexMatrix h = build_hamiltonian(ModelKind::kEffective, {}, c, {}, 0.0).drift.matrix();
  EXPECT_NEAR(h(1, 2).real(), 0.02, 1e-15);
  const double zeta = (h(0, 0) - h(1, 1) - h(2, 2) + h(3, 3)).real();
  EXPECT_NEAR(zeta, -0.002, 1e-14);
}

TEST(BuildHamiltonian, DuffingUncoupledHarmonicSpectrum) {
  DeviceParams p;
  p.g = {0.0, 0.0};
  TruncationConfig t;
  t.n_duff = 3;
  const std::array<double, 2> w{5.1, 4.3};
  const ModelCurves c = constant_curves({5.0, 6.0}, 0.0, 0.0, w, {0.0, 0.0});
  const ModelHamiltonian m = build_hamiltonian(ModelKind::kDuffing, p, c, t, 0.2);
  std::vector<double> expected;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int d = 0; d < 3; ++d) expected.push_back(a * w[1] + b * p.omega_c + d * w[0]);
    }
  }
  std::sort(expected.begin(), expected.end());
  const RealVector e = spectrum_of(m);
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(e(static_cast<Index>(k)), expected[k], 1e-12);
}

TEST(BuildHamiltonian, CircuitDressingIsSmall) {
  const DeviceParams p;
  DeviceParams off = p;
  off.g = {0.0, 0.0};
  const TruncationConfig t;
  const ModelHamiltonian coupled = build_hamiltonian(ModelKind::kCircuit, p, {}, t, 0.0);
  const ModelHamiltonian bare = build_hamiltonian(ModelKind::kCircuit, off, {}, t, 0.0);
  // |0,0,1> is q0 excited; the dressed level is the eigenvalue closest to the bare one.
  const Index i01 = label_index(coupled.dims, {0, 0, 1});
  const double bare01 = bare.drift.matrix()(i01, i01).real();
  const RealVector e = spectrum_of(coupled);
  const double e0 = e(0);
  Index best = 0;
  (e.array() - e0 - bare01).abs().minCoeff(&best);
  EXPECT_LT(std::abs(e(best) - e0 - bare01), 0.2);

  // Reduced truncation cross-checked against an independent dense eigensolver.
  TruncationConfig small;
  small.n_q = 9;
  small.n_eq = 3;
  small.n_ec = 3;
  const ModelHamiltonian m = build_hamiltonian(ModelKind::kCircuit, p, {}, small, 0.17);
  const oracle::RVec ref = oracle::jacobi_eigenvalues(m.drift.matrix());
  const RealVector got = spectrum_of(m);
  for (Index k = 0; k < got.size(); ++k) EXPECT_NEAR(got(k), ref(k), 1e-10);
}

TEST(BuildHamiltonian, MissingCurvesRejected) {
  try {
    build_hamiltonian(ModelKind::kDuffing, {}, {}, {}, 0.0);
    FAIL() << "expected an error";
  } catch (const CalibrationError& e) {
    EXPECT_NE(std::string(e.what()).find("model not calibrated"), std::string::npos);
  }
}

TEST(DriveOperator, EffectiveTwoEntries) {
  const ModelCurves c = constant_curves({5.0, 6.0}, 0.01, 0.0, {5.0, 6.0}, {-0.3, -0.3});
  const DriveOperator d = drive_operator(build_hamiltonian(ModelKind::kEffective, {}, c, {}, 0.0), 0);
  EXPECT_EQ((d.lowering.array().abs() > 0).count(), 2);
  EXPECT_EQ(d.lowering(0, 1), Complex(1.0, 0.0));  // |00> <- |01>
  EXPECT_EQ(d.lowering(2, 3), Complex(1.0, 0.0));  // |10> <- |11>
  EXPECT_EQ(max_abs(d.raising - d.lowering.adjoint()), 0.0);
}

TEST(DriveOperator, DuffingBosonicLadder) {
  TruncationConfig t;
  t.n_duff = 3;
  const ModelCurves c = constant_curves({5.0, 6.0}, 0.0, 0.0, {5.0, 6.0}, {-0.3, -0.3});
  const ModelHamiltonian m = build_hamiltonian(ModelKind::kDuffing, {}, c, t, 0.0);
  for (int j : {0, 1}) {
    const DriveOperator d = drive_operator(m, j);
    const oracle::CMat ref = oracle::kron_embed(oracle::lowering(3), j == 0 ? 2 : 0, {3, 3, 3});
    EXPECT_LT(max_abs(d.lowering - ref), 1e-15);
  }
  EXPECT_NEAR(m.lowering[0](1, 2).real(), std::sqrt(2.0), 1e-15);
}

TEST(DriveOperator, CircuitNormalisedToUnitMatrixElement) {
  TruncationConfig t;
  t.n_q = 15;
  t.n_eq = 4;
  t.n_ec = 3;
  const DeviceParams p;
  const ModelHamiltonian m = build_hamiltonian(ModelKind::kCircuit, p, {}, t, 0.1);
  for (int j : {0, 1}) {
    const ComplexMatrix& a = m.lowering[static_cast<std::size_t>(j)];
    EXPECT_NEAR(std::abs(a(0, 1)), 1.0, 1e-14);
    // a + a^dagger follows the rescaled nearest-level charge structure.
    const std::size_t js = static_cast<std::size_t>(j);
    const ChargeBasisTransmon tr = transmon_charge_hamiltonian(
        p.ec[js], ej_of_flux(p, j, j == 1 ? 0.1 : 0.0), p.n_g[js], t.n_q);
    const TruncatedTransmon r = truncate_to_eigenbasis(tr.hamiltonian, tr.n_hat, t.n_eq);
    const double scale = std::abs(r.n_projected(0, 1));
    for (Index k = 0; k + 1 < t.n_eq; ++k) {
      EXPECT_NEAR(std::abs(a(k, k + 1) + std::conj(a(k + 1, k))), std::abs(r.n_projected(k, k + 1)) / scale,
                  1e-12);
    }
  }
}

TEST(DeviceInvariants, HermitianPeriodicSymmetric) {
  const DeviceParams p;
  TruncationConfig t;
  t.n_q = 15;
  t.n_eq = 4;
  t.n_ec = 4;
  for (double phi : {0.05, 0.233, 0.41}) {
    const ModelHamiltonian a = build_hamiltonian(ModelKind::kCircuit, p, {}, t, phi);
    const ModelHamiltonian b = build_hamiltonian(ModelKind::kCircuit, p, {}, t, phi + 1.0);
    const ModelHamiltonian c = build_hamiltonian(ModelKind::kCircuit, p, {}, t, -phi);
    const RealVector ea = spectrum_of(a);
    EXPECT_LT((ea - spectrum_of(b)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((ea - spectrum_of(c)).cwiseAbs().maxCoeff(), 1e-9);
    const SparseModel s = assemble_model(ModelKind::kCircuit, p, {}, t, phi);
    const ComplexMatrix dense(s.drift);
    EXPECT_LE(max_abs(dense - dense.adjoint()), 1e-10);
  }
}

TEST(DeviceInvariants, DecoupledLimitFactorises) {
  DeviceParams p;
  p.g = {0.0, 0.0};
  TruncationConfig t;
  t.n_q = 15;
  t.n_eq = 4;
  t.n_ec = 3;
  const ModelCurves c = constant_curves({5.0, 6.0}, 0.0, 0.0, {9.1, 7.9}, {-0.31, -0.33});
  for (ModelKind kind : {ModelKind::kCircuit, ModelKind::kDuffing}) {
    const ModelHamiltonian m = build_hamiltonian(kind, p, c, t, 0.3);
    const ComplexMatrix& h = m.drift.matrix();
    // Diagonal in the product basis, so every level is a sum of subsystem levels.
    EXPECT_LE(max_abs(h - ComplexMatrix(h.diagonal().asDiagonal())), 1e-8);
    const Index n1 = m.dims[0], nc = m.dims[1], n0 = m.dims[2];
    for (const BasisLabel& l : m.labels) {
      const double sum = h(label_index(m.dims, {l.q1, 0, 0}), label_index(m.dims, {l.q1, 0, 0})).real() +
                         h(label_index(m.dims, {0, l.c, 0}), label_index(m.dims, {0, l.c, 0})).real() +
                         h(label_index(m.dims, {0, 0, l.q0}), label_index(m.dims, {0, 0, l.q0})).real();
      EXPECT_NEAR(h(label_index(m.dims, l), label_index(m.dims, l)).real(), sum, 1e-8);
    }
    EXPECT_EQ(n1 * nc * n0, m.drift.dim());
  }
}

TEST(DeviceInvariants, TruncationErrorsReachPlateau) {
  const DeviceParams p;
  const TruncationConfig ref{23, 9, 6, 3, 0};
  const RealVector e_ref = spectrum_of(build_hamiltonian(ModelKind::kCircuit, p, {}, ref, 0.1)).head(4);
  double previous = 1e300;
  for (int n_q : {9, 11, 13, 15, 17, 19, 21}) {
    TruncationConfig t = ref;
    t.n_q = n_q;
    const RealVector e = spectrum_of(build_hamiltonian(ModelKind::kCircuit, p, {}, t, 0.1)).head(4);
    const double err = (e - e_ref).cwiseAbs().maxCoeff();
    EXPECT_LE(err, previous + 1e-9) << "n_q " << n_q;
    previous = err;
  }
  EXPECT_LT(previous, 1e-6);
}

TEST(TruncatedTransmon, ChargeMatrixGaugeIsSmoothInFlux) {
  const DeviceParams d;
  ComplexMatrix prev;
  double worst = 0.0;
  for (double phi = 0.0; phi <= 0.45; phi += 1e-3) {
    const auto t = transmon_charge_hamiltonian(d.ec[1], ej_of_flux(d, 1, phi), 0.0, 23);
    const ComplexMatrix n = truncate_to_eigenbasis(t.hamiltonian, t.n_hat, 9).n_projected;
    for (Index k = 0; k + 1 < 9; ++k) {
      EXPECT_GT(n(k, k + 1).real(), 0.0);
      EXPECT_NEAR(n(k, k + 1).imag(), 0.0, 1e-12);
    }
    if (prev.size()) worst = std::max(worst, (n - prev).cwiseAbs().maxCoeff());
    prev = n;
  }
  EXPECT_LT(worst, 0.05);
}

TEST(DeviceInvariants, CircuitCouplingsAreLipschitzInFlux) {
  const DeviceParams d;
  const TruncationConfig t{15, 5, 4, 3, 0};
  // Largest off-diagonal change between neighbouring flux points.
  auto worst_step = [&](double h) {
    SparseComplexMatrix prev = assemble_circuit(d, t, 0.0).drift;
    double worst = 0.0;
    for (int i = 1; i * h <= 0.45 + 1e-12; ++i) {
      const SparseComplexMatrix cur = assemble_circuit(d, t, i * h).drift;
      ComplexMatrix step = cur - prev;
      step.diagonal().setZero();
      worst = std::max(worst, step.cwiseAbs().maxCoeff());
      prev = cur;
    }
    return worst;
  };
  // A basis sign flip would not shrink with the step.
  const double coarse = worst_step(2e-3);
  const double fine = worst_step(1e-3);
  EXPECT_GT(coarse / fine, 1.8);
  EXPECT_LT(coarse, 0.05);
}

TEST(BasisLabels, OrderingAndIndex) {
  const Dims dims{3, 2, 4};
  const std::vector<BasisLabel> labels = product_labels(dims);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_EQ(label_index(dims, labels[i]), static_cast<Index>(i));
  }
  EXPECT_EQ(labels[1], (BasisLabel{0, 0, 1}));
  EXPECT_EQ((BasisLabel{1, 0, 1}).to_string(), "|1,0,1>");
}

}  // namespace
}  // namespace pulsesim
