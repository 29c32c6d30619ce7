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

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pulsesim/curves.hpp"
#include "pulsesim/linalg.hpp"

namespace pulsesim {

/// Physical constants of the two-transmon, one-bus device. Per-qubit arrays
/// are indexed by qubit number j (index 0 is q0, index 1 is q1). All energies
/// in GHz.
struct DeviceParams {
  std::array<double, 2> ej_max{42.34, 28.48};
  std::array<double, 2> ec{0.297, 0.317};
  std::array<double, 2> d{0.0, 0.0};    // SQUID asymmetry
  std::array<double, 2> n_g{0.0, 0.0};  // offset charge
  std::array<double, 2> g{0.199, 0.183};
  double omega_c = 6.902;
  double kappa = 0.001;  // stored only; dynamics are closed-system

  /// Throws InvalidArgument on hard violations and returns advisory
  /// messages (for example E_J/E_C below the transmon regime).
  std::vector<std::string> validate() const;
};

struct TruncationConfig {
  int n_q = 23;   // charge-basis dimension, 2 ncut + 1
  int n_eq = 9;   // retained transmon eigenstates
  int n_ec = 6;   // retained bus levels (circuit model)
  int n_duff = 3; // Duffing levels per mode
  int n_duff_coupler = 0;  // Duffing bus levels; 0 means n_duff

  void validate() const;
  int duffing_coupler_levels() const { return n_duff_coupler > 0 ? n_duff_coupler : n_duff; }
};

/// Product-basis label |q1, c, q0>.
struct BasisLabel {
  int q1 = 0;
  int c = 0;
  int q0 = 0;

  int excitations() const { return q1 + c + q0; }
  std::string to_string() const;
  friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

enum class ModelKind { kEffective, kDuffing, kCircuit };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelCurves {
  std::optional<EffectiveCurves> effective;
  std::optional<DuffingCurves> duffing;
};

/// Drift Hamiltonian of one model at fixed flux. The product basis is
/// |q1, c, q0> with q0 least significant; each subsystem is referenced to
/// its own ground level, so the bare ground state has energy 0.
struct ModelHamiltonian {
  ModelKind kind;
  HermitianOperator drift;
  Dims dims;
  std::vector<BasisLabel> labels;
  double flux;
  std::array<ComplexMatrix, 2> lowering;  // local lowering operator per qubit j
};

/// Same content as ModelHamiltonian with the drift kept sparse. This is the
/// form the propagator consumes.
struct SparseModel {
  ModelKind kind;
  SparseComplexMatrix drift;
  Dims dims;
  double flux;
  std::array<ComplexMatrix, 2> lowering;
};

Slot qubit_slot(int j);
Index label_index(const Dims& dims, const BasisLabel& label);
std::vector<BasisLabel> product_labels(const Dims& dims);

/// Flux-tuned Josephson energy of qubit j.
double ej_of_flux(const DeviceParams& params, int j, double phi);

struct ChargeBasisTransmon {
  HermitianOperator hamiltonian;
  ComplexMatrix n_hat;  // diagonal charge-number operator
};

ChargeBasisTransmon transmon_charge_hamiltonian(double ec, double ej, double n_g, int n_q);

struct TruncatedTransmon {
  RealVector energies;         // lowest n_eq levels, energies[0] == 0
  ComplexMatrix n_projected;   // V^dagger n V on the retained levels
};

TruncatedTransmon truncate_to_eigenbasis(const HermitianOperator& h, const ComplexMatrix& n_hat,
                                         int n_eq);

/// Lowering operator from a projected charge operator: only the <k|n|k+1>
/// entries are kept, rescaled so |<0|a|1>| = 1. Also returns the scale used.
std::pair<ComplexMatrix, double> lowering_from_charge(const ComplexMatrix& n_projected);

/// Four-level computational model; omega_tilde indexed by qubit j.
SparseModel assemble_effective(const std::array<double, 2>& omega_tilde, double exchange,
                               double zz, double phi);
SparseModel assemble_duffing(const DeviceParams& params, const std::array<double, 2>& omega,
                             const std::array<double, 2>& alpha, int qubit_levels,
                             int coupler_levels, double phi);
SparseModel assemble_circuit(const DeviceParams& params, const TruncationConfig& trunc,
                             double phi);
SparseModel assemble_model(ModelKind kind, const DeviceParams& params, const ModelCurves& curves,
                           const TruncationConfig& trunc, double phi);

ModelHamiltonian densify(const SparseModel& model);

ModelHamiltonian build_hamiltonian(ModelKind kind, const DeviceParams& params,
                                   const ModelCurves& curves, const TruncationConfig& trunc,
                                   double phi);

struct DriveOperator {
  ComplexMatrix lowering;
  ComplexMatrix raising;
};

/// Embedded lowering/raising pair for qubit j.
DriveOperator drive_operator(const ModelHamiltonian& model, int j);
DriveOperator drive_operator(const SparseModel& model, int j);

/// -A/2 (e^{-i theta} a^dagger + e^{i theta} a)
ComplexMatrix drive_term(const DriveOperator& op, double amplitude, double theta);

}  // namespace pulsesim
