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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulsesim/curves.hpp"
#include "pulsesim/device.hpp"
#include "pulsesim/linalg.hpp"

namespace pulsesim {

/// Computational labels in the order |00>, |01>, |10>, |11> (as |q1 q0>),
/// embedded with the bus in its ground level.
inline constexpr std::array<BasisLabel, 4> kComputationalLabels{
    BasisLabel{0, 0, 0}, BasisLabel{0, 0, 1}, BasisLabel{1, 0, 0}, BasisLabel{1, 0, 1}};

/// Eigenvector chosen for each computational label and the overlap magnitude |<v|l>|
/// with the bare product state.
struct AssignmentMap {
  std::array<Index, 4> eigen_index{};
  std::array<double, 4> overlap{};
  bool low_overlap = false;  // some overlap below 0.7
};

struct ProjectedHamiltonian {
  HermitianOperator h4;            // ordered |00>, |01>, |10>, |11>
  std::array<double, 4> energies;  // assigned dressed energies, relative to ground
};

struct StaticExtraction {
  double phi = 0.0;
  std::array<double, 2> omega_tilde{};  // indexed by qubit j
  double j_coupling = 0.0;
  double zeta = 0.0;
  std::array<double, 4> energies{};  // E00, E01, E10, E11 relative to ground
};

/// Maximises the total squared overlap over distinct eigenvectors. Throws
/// CalibrationError("assignment ambiguous at flux ...") when any label's
/// best achievable overlap falls below 0.5.
AssignmentMap assign_dressed_states(const Spectrum& spectrum, const Dims& dims, double phi = 0.0);

ProjectedHamiltonian project_computational(const Spectrum& spectrum, const AssignmentMap& map,
                                           const Dims& dims);

StaticExtraction extract_static_quantities(const ProjectedHamiltonian& projected, double phi);

struct StaticAnalysis {
  Spectrum spectrum;
  AssignmentMap assignment;
  StaticExtraction extraction;
};

/// Diagonalise, assign, project and extract in one go.
StaticAnalysis analyze_static(const ModelHamiltonian& model);

struct FluxSample {
  double phi;
  double value;
};

HarmonicFit fit_harmonic(std::span<const FluxSample> samples, int order);

SurrogateFit fit_surrogate(std::span<const FluxSample> samples, const HarmonicFit& omega_tilde_q1,
                           double omega_c);

struct SweepPoint {
  double phi = 0.0;
  std::optional<StaticExtraction> extraction;
  AssignmentMap assignment;
  std::string failure;  // empty when extraction succeeded
};

std::vector<double> uniform_grid(double lo, double hi, int points);

/// Circuit-model static extraction over a flux grid. Points whose assignment
/// fails are kept with `failure` set.
std::vector<SweepPoint> circuit_sweep(const DeviceParams& params, const TruncationConfig& trunc,
                                      std::span<const double> grid);

struct EffectiveCalibration {
  EffectiveCurves curves;
  std::vector<std::string> flags;
};

EffectiveCalibration calibrate_effective(std::span<const StaticExtraction> sweep, int order,
                                         double omega_c);

struct DuffingPointEstimate {
  double phi = 0.0;
  std::array<double, 2> omega{};
  std::array<double, 2> alpha{};
  double objective = 0.0;
};

struct DuffingCalibration {
  DuffingCurves curves;
  std::vector<DuffingPointEstimate> stage1;
  std::vector<DuffingPointEstimate> refined;
  std::vector<std::string> flags;
};

/// Single-transmon charge-basis estimates omega = E1 - E0 and
/// alpha = E2 - 2 E1 + E0 for qubit j at flux phi.
std::pair<double, double> transmon_frequency_and_anharmonicity(const DeviceParams& params, int j,
                                                               double phi, int n_q);

/// Static mismatch objective between a Duffing extraction and the circuit
/// reference: spectral RMSE^2 + dJ^2 + dzeta^2 (GHz^2).
double duffing_mismatch(const StaticExtraction& duffing, const StaticExtraction& reference);

DuffingCalibration calibrate_duffing(const DeviceParams& params, const TruncationConfig& trunc,
                                     std::span<const SweepPoint> reference, int order = 4);
DuffingCalibration calibrate_duffing(const DeviceParams& params, const TruncationConfig& trunc,
                                     std::span<const double> grid, int order = 4);

/// Root-mean-square difference over the four computational energies.
double spectral_rmse(const StaticExtraction& a, const StaticExtraction& b);

}  // namespace pulsesim
