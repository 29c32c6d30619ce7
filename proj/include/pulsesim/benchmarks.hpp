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

#include <optional>
#include <string>
#include <vector>

#include "pulsesim/artifact.hpp"
#include "pulsesim/calibration.hpp"
#include "pulsesim/config.hpp"
#include "pulsesim/dynamics.hpp"
#include "pulsesim/table.hpp"

namespace pulsesim {

inline constexpr std::array<ModelKind, 3> kAllModels{ModelKind::kCircuit, ModelKind::kEffective,
                                                     ModelKind::kDuffing};

/// Shared state for one benchmark run: the config, the circuit sweep on the
/// config grid and the calibration, each computed at most once.
class Session {
 public:
  explicit Session(RunConfig config);

  const RunConfig& config() const { return config_; }
  std::string config_hash() const;

  const std::vector<SweepPoint>& sweep();
  const CalibrationArtifact& calibration();
  void set_calibration(CalibrationArtifact artifact);
  const std::optional<DuffingCalibration>& duffing_details() const { return duffing_details_; }

  ModelFamily family(ModelKind kind);

 private:
  RunConfig config_;
  std::optional<std::vector<SweepPoint>> sweep_;
  std::optional<CalibrationArtifact> artifact_;
  std::optional<DuffingCalibration> duffing_details_;
};

struct CalibrateResult {
  CalibrationArtifact artifact;
  std::vector<Table> tables;
};

CalibrateResult run_calibrate(Session& session);

struct StaticSweepResult {
  Table table;
  double mean_rmse_effective = 0.0;
  double mean_rmse_duffing = 0.0;
  double zeta_extremum_phi = 0.0;    // circuit sweep, most negative zeta
  double zeta_extremum_value = 0.0;
  double max_abs_j = 0.0;            // over all models and flux points
  double max_abs_zeta = 0.0;
  int flagged_points = 0;
};

StaticSweepResult run_static_sweep(Session& session);

struct ConvergenceRow {
  std::string axis;
  int value = 0;
  double rmse = 0.0;
  double dj = 0.0;
  double dzeta = 0.0;
  int failures = 0;
};

struct TruncationResult {
  std::vector<ConvergenceRow> rows;
  std::vector<Table> tables;
};

TruncationResult run_truncation_study(Session& session);

struct RxModelResult {
  ModelKind kind;
  std::string failure;  // empty on success
  std::vector<double> times;
  TransferMismatch transfer;
  std::vector<double> leakage_spectator0;
  std::vector<double> leakage_spectator1;
  double max_norm_defect = 0.0;
  double max_unitarity_defect = 0.0;
};

struct RxResult {
  double carrier = 0.0;
  DriveFrame frame = DriveFrame::kLab;
  PulseSchedule schedule;
  std::vector<RxModelResult> models;
  std::vector<Table> tables;
};

RxResult run_rx_benchmark(Session& session);

struct CzModelResult {
  ModelKind kind;
  std::string failure;
  std::vector<double> times;
  std::vector<double> phi_cz;               // idle-flux dressed frame
  std::vector<double> phi_cz_target_frame;  // target-flux dressed frame
  std::vector<double> leakage;
  double phi_cz_hold = 0.0;  // accumulated over the flat segment, target frame
  double phi_cz_final = 0.0;
  double linear_deviation = 0.0;  // max deviation from a line over the flat segment, rad
  double max_norm_defect = 0.0;
  double max_unitarity_defect = 0.0;
};

struct CzOptions {
  std::optional<double> hold;  // overrides 1 / (2 |zeta|)
};

struct CzResult {
  double zeta_target = 0.0;
  double hold = 0.0;
  PulseSchedule schedule;
  std::vector<CzModelResult> models;
  std::vector<Table> tables;
};

CzResult run_cz_benchmark(Session& session, const CzOptions& options = {});

struct LeakageModelResult {
  ModelKind kind;
  std::string failure;
  PopulationCurrentRecord record;
  ContinuityReport continuity;
  BasisLabel early_partner;      // largest early net exchange with |1,0,1>
  double early_transfer = 0.0;   // signed population moved from |1,0,1> to that partner
  double max_leakage = 0.0;
  double max_norm_defect = 0.0;
  double max_unitarity_defect = 0.0;
};

struct LeakageResult {
  double window = 0.0;
  double early_window = 0.0;
  std::vector<LeakageModelResult> models;
  std::vector<Table> tables;
};

LeakageResult run_leakage_analysis(Session& session, std::optional<double> hold = {});

struct RuntimeRow {
  ModelKind kind;
  int truncation = 0;
  double build_seconds = 0.0;
  double propagation_seconds = 0.0;
  Index dimension = 0;
};

struct RuntimeResult {
  std::vector<RuntimeRow> rows;
  Table table;
};

RuntimeResult run_runtime_benchmark(Session& session);

/// Computational basis state |q1 q0> of the dressed frame.
std::array<Complex, 4> basis_coefficients(int q1, int q0);

}  // namespace pulsesim
