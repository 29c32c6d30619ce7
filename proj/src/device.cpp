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

#include "pulsesim/device.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "pulsesim/errors.hpp"

namespace pulsesim {

namespace {

SparseComplexMatrix sparse_identity(Index n) {
  SparseComplexMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseComplexMatrix to_sparse(const ComplexMatrix& m) {
  const double scale = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
  return m.sparseView(Complex(scale, 0.0), 1e-15);
}

// I (x) .. (x) op (x) .. (x) I in sparse form.
SparseComplexMatrix embed_sparse(const SparseComplexMatrix& op, Slot slot, const Dims& dims) {
  const auto s = static_cast<std::size_t>(slot);
  std::array<SparseComplexMatrix, 3> f;
  for (std::size_t k = 0; k < 3; ++k) f[k] = (k == s) ? op : sparse_identity(dims[k]);
  SparseComplexMatrix left = Eigen::kroneckerProduct(f[0], f[1]);
  SparseComplexMatrix full = Eigen::kroneckerProduct(left, f[2]);
  return full;
}

SparseComplexMatrix diagonal(const RealVector& values) {
  SparseComplexMatrix d(values.size(), values.size());
  d.reserve(Eigen::VectorXi::Constant(values.size(), 1));
  for (Index k = 0; k < values.size(); ++k) d.insert(k, k) = values(k);
  d.makeCompressed();
  return d;
}

SparseComplexMatrix bosonic_lowering(int levels) {
  SparseComplexMatrix a(levels, levels);
  for (int k = 1; k < levels; ++k) a.insert(k - 1, k) = std::sqrt(static_cast<double>(k));
  a.makeCompressed();
  return a;
}

RealVector level_indices(int levels) { return RealVector::LinSpaced(levels, 0.0, levels - 1.0); }

}  // namespace

std::vector<std::string> DeviceParams::validate() const {
  std::vector<std::string> advisories;
  for (int j = 0; j < 2; ++j) {
    if (!(ej_max[j] > 0.0)) throw InvalidArgument("ej_max must be positive");
    if (!(ec[j] > 0.0)) throw InvalidArgument("ec must be positive");
    if (!(g[j] >= 0.0)) throw InvalidArgument("g must be non-negative");
    if (!(d[j] >= 0.0 && d[j] < 1.0)) throw InvalidArgument("d must lie in [0, 1)");
    if (!std::isfinite(n_g[j])) throw InvalidArgument("n_g must be finite");
    if (ej_max[j] / ec[j] <= 10.0) {
      std::ostringstream msg;
      msg << "qubit " << j << ": ej_max/ec = " << ej_max[j] / ec[j]
          << " is outside the transmon regime";
      advisories.push_back(msg.str());
    }
  }
  if (!(omega_c > 0.0)) throw InvalidArgument("omega_c must be positive");
  if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be non-negative");
  return advisories;
}

void TruncationConfig::validate() const {
  if (n_q < 3 || n_q % 2 == 0) throw InvalidArgument("charge basis must be symmetric (odd n_q >= 3)");
  if (n_eq < 2 || n_eq > n_q) throw InvalidArgument("n_eq must satisfy 2 <= n_eq <= n_q");
  if (n_ec < 2) throw InvalidArgument("n_ec must be at least 2");
  if (n_duff < 2) throw InvalidArgument("n_duff must be at least 2");
  if (n_duff_coupler != 0 && n_duff_coupler < 2) {
    throw InvalidArgument("n_duff_coupler must be 0 (same as n_duff) or at least 2");
  }
}

std::string BasisLabel::to_string() const {
  std::ostringstream out;
  out << '|' << q1 << ',' << c << ',' << q0 << '>';
  return out.str();
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kEffective: return "effective";
    case ModelKind::kDuffing: return "duffing";
    case ModelKind::kCircuit: return "circuit";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "effective") return ModelKind::kEffective;
  if (name == "duffing") return ModelKind::kDuffing;
  if (name == "circuit") return ModelKind::kCircuit;
  throw InvalidArgument("unknown model kind: " + std::string(name));
}

Slot qubit_slot(int j) {
  if (j == 0) return Slot::kQ0;
  if (j == 1) return Slot::kQ1;
  throw InvalidArgument("qubit index must be 0 or 1");
}

Index label_index(const Dims& dims, const BasisLabel& label) {
  return (static_cast<Index>(label.q1) * dims[1] + label.c) * dims[2] + label.q0;
}

std::vector<BasisLabel> product_labels(const Dims& dims) {
  std::vector<BasisLabel> labels;
  labels.reserve(static_cast<std::size_t>(total_dim(dims)));
  for (int q1 = 0; q1 < dims[0]; ++q1) {
    for (int c = 0; c < dims[1]; ++c) {
      for (int q0 = 0; q0 < dims[2]; ++q0) labels.push_back({q1, c, q0});
    }
  }
  return labels;
}

double ej_of_flux(const DeviceParams& params, int j, double phi) {
  const double c = std::cos(std::numbers::pi * phi);
  const double s = std::sin(std::numbers::pi * phi);
  const double d = params.d.at(static_cast<std::size_t>(j));
  return params.ej_max.at(static_cast<std::size_t>(j)) * std::sqrt(c * c + d * d * s * s);
}

ChargeBasisTransmon transmon_charge_hamiltonian(double ec, double ej, double n_g, int n_q) {
  if (n_q < 1 || n_q % 2 == 0) throw InvalidArgument("charge basis must be symmetric");
  const int ncut = n_q / 2;
  ComplexMatrix h = ComplexMatrix::Zero(n_q, n_q);
  ComplexMatrix n_hat = ComplexMatrix::Zero(n_q, n_q);
  for (int k = 0; k < n_q; ++k) {
    const double n = static_cast<double>(k - ncut);
    h(k, k) = 4.0 * ec * (n - n_g) * (n - n_g);
    n_hat(k, k) = n;
    if (k + 1 < n_q) {
      h(k, k + 1) = -0.5 * ej;
      h(k + 1, k) = -0.5 * ej;
    }
  }
  return {HermitianOperator(h), n_hat};
}

TruncatedTransmon truncate_to_eigenbasis(const HermitianOperator& h, const ComplexMatrix& n_hat,
                                         int n_eq) {
  if (n_eq < 1 || n_eq > h.dim()) throw InvalidArgument("n_eq exceeds the basis dimension");
  const Spectrum spec = eigh(h);
  ComplexMatrix v = spec.vectors.leftCols(n_eq);
  // Gauge <k|n|k+1> real positive, so the basis varies smoothly with E_J.
  for (Index k = 0; k + 1 < n_eq; ++k) {
    const Complex z = v.col(k).dot(n_hat * v.col(k + 1));
    if (std::abs(z) > 1e-12) v.col(k + 1) *= std::conj(z) / std::abs(z);
  }
  TruncatedTransmon out;
  out.energies = spec.energies.head(n_eq).array() - spec.energies(0);
  out.n_projected = v.adjoint() * n_hat * v;
  return out;
}

std::pair<ComplexMatrix, double> lowering_from_charge(const ComplexMatrix& n_projected) {
  const Index n = n_projected.rows();
  const double scale = std::abs(n_projected(0, 1));
  if (!(scale > 1e-12)) throw NumericalError("vanishing <0|n|1> matrix element");
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) a(k, k + 1) = n_projected(k, k + 1) / scale;
  return {a, scale};
}

SparseModel assemble_effective(const std::array<double, 2>& omega_tilde, double exchange,
                               double zz, double phi) {
  // Basis |q1 q0> with index 2 q1 + q0. Z_j = 2 n_j - 1 so that exciting
  // qubit j raises the energy by omega_tilde_j.
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  for (int q1 = 0; q1 < 2; ++q1) {
    for (int q0 = 0; q0 < 2; ++q0) {
      const double z1 = 2.0 * q1 - 1.0;
      const double z0 = 2.0 * q0 - 1.0;
      h(2 * q1 + q0, 2 * q1 + q0) =
          0.5 * omega_tilde[1] * z1 + 0.5 * omega_tilde[0] * z0 + 0.25 * zz * z1 * z0;
    }
  }
  // J (X1 X0 + Y1 Y0) = 2 J (|01><10| + |10><01|)
  h(1, 2) = 2.0 * exchange;
  h(2, 1) = 2.0 * exchange;
  h.diagonal().array() -= h(0, 0);

  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  return {ModelKind::kEffective, to_sparse(h), Dims{2, 1, 2}, phi, {lower, lower}};
}

SparseModel assemble_duffing(const DeviceParams& params, const std::array<double, 2>& omega,
                             const std::array<double, 2>& alpha, int qubit_levels,
                             int coupler_levels, double phi) {
  const Dims dims{qubit_levels, coupler_levels, qubit_levels};
  const RealVector nq = level_indices(qubit_levels);
  const RealVector nc = level_indices(coupler_levels);
  const SparseComplexMatrix a_q = bosonic_lowering(qubit_levels);
  const SparseComplexMatrix a_c = embed_sparse(bosonic_lowering(coupler_levels), Slot::kCoupler, dims);

  SparseComplexMatrix h = embed_sparse(diagonal(params.omega_c * nc), Slot::kCoupler, dims);
  for (int j = 0; j < 2; ++j) {
    const RealVector local =
        omega[j] * nq.array() + 0.5 * alpha[j] * nq.array() * (nq.array() - 1.0);
    const Slot slot = qubit_slot(j);
    h += embed_sparse(diagonal(local), slot, dims);
    const SparseComplexMatrix a_j = embed_sparse(a_q, slot, dims);
    const SparseComplexMatrix hop = a_j.adjoint() * a_c;
    h += params.g[j] * (hop + SparseComplexMatrix(hop.adjoint()));
  }
  h.prune(Complex(0.0, 0.0));
  const ComplexMatrix lower = ComplexMatrix(a_q);
  return {ModelKind::kDuffing, h, dims, phi, {lower, lower}};
}

SparseModel assemble_circuit(const DeviceParams& params, const TruncationConfig& trunc,
                             double phi) {
  trunc.validate();
  const Dims dims{trunc.n_eq, trunc.n_ec, trunc.n_eq};
  const SparseComplexMatrix a_c = bosonic_lowering(trunc.n_ec);
  const SparseComplexMatrix x_c =
      embed_sparse(SparseComplexMatrix(a_c + SparseComplexMatrix(a_c.adjoint())), Slot::kCoupler, dims);

  SparseComplexMatrix h =
      embed_sparse(diagonal(params.omega_c * level_indices(trunc.n_ec)), Slot::kCoupler, dims);
  std::array<ComplexMatrix, 2> lowering;
  for (int j = 0; j < 2; ++j) {
    const double flux_j = (j == 1) ? phi : 0.0;
    const ChargeBasisTransmon transmon = transmon_charge_hamiltonian(
        params.ec[j], ej_of_flux(params, j, flux_j), params.n_g[j], trunc.n_q);
    const TruncatedTransmon reduced =
        truncate_to_eigenbasis(transmon.hamiltonian, transmon.n_hat, trunc.n_eq);
    auto [lower, scale] = lowering_from_charge(reduced.n_projected);
    lowering[static_cast<std::size_t>(j)] = std::move(lower);

    const Slot slot = qubit_slot(j);
    h += embed_sparse(diagonal(reduced.energies), slot, dims);
    const SparseComplexMatrix n_j = embed_sparse(to_sparse(reduced.n_projected), slot, dims);
    h += (params.g[j] / scale) * SparseComplexMatrix(n_j * x_c);
  }
  h.prune(Complex(0.0, 0.0));
  return {ModelKind::kCircuit, h, dims, phi, lowering};
}

SparseModel assemble_model(ModelKind kind, const DeviceParams& params, const ModelCurves& curves,
                           const TruncationConfig& trunc, double phi) {
  switch (kind) {
    case ModelKind::kEffective: {
      if (!curves.effective) throw CalibrationError("model not calibrated: effective curves missing");
      const EffectiveCurves& c = *curves.effective;
      return assemble_effective({c.omega_tilde[0].evaluate(phi), c.omega_tilde[1].evaluate(phi)},
                                evaluate(c.exchange, phi), evaluate(c.zz, phi), phi);
    }
    case ModelKind::kDuffing: {
      if (!curves.duffing) throw CalibrationError("model not calibrated: duffing curves missing");
      const DuffingCurves& c = *curves.duffing;
      return assemble_duffing(params, {c.omega[0].evaluate(phi), c.omega[1].evaluate(phi)},
                              {c.alpha[0].evaluate(phi), c.alpha[1].evaluate(phi)}, trunc.n_duff,
                              trunc.duffing_coupler_levels(), phi);
    }
    case ModelKind::kCircuit:
      return assemble_circuit(params, trunc, phi);
  }
  throw InvalidArgument("unknown model kind");
}

ModelHamiltonian densify(const SparseModel& model) {
  return ModelHamiltonian{model.kind, HermitianOperator(ComplexMatrix(model.drift)), model.dims,
                          product_labels(model.dims), model.flux, model.lowering};
}

ModelHamiltonian build_hamiltonian(ModelKind kind, const DeviceParams& params,
                                   const ModelCurves& curves, const TruncationConfig& trunc,
                                   double phi) {
  return densify(assemble_model(kind, params, curves, trunc, phi));
}

namespace {

DriveOperator embed_drive(const ComplexMatrix& local, const Dims& dims, int j) {
  ComplexMatrix lower = embed_operator(local, qubit_slot(j), dims);
  ComplexMatrix raise = lower.adjoint();
  return {std::move(lower), std::move(raise)};
}

}  // namespace

DriveOperator drive_operator(const ModelHamiltonian& model, int j) {
  return embed_drive(model.lowering.at(static_cast<std::size_t>(j)), model.dims, j);
}

DriveOperator drive_operator(const SparseModel& model, int j) {
  return embed_drive(model.lowering.at(static_cast<std::size_t>(j)), model.dims, j);
}

ComplexMatrix drive_term(const DriveOperator& op, double amplitude, double theta) {
  return -0.5 * amplitude *
         (std::polar(1.0, -theta) * op.raising + std::polar(1.0, theta) * op.lowering);
}

}  // namespace pulsesim
