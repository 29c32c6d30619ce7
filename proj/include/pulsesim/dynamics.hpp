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
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "pulsesim/device.hpp"
#include "pulsesim/linalg.hpp"

namespace pulsesim {

enum class PulseKind { kFlux, kDrive };

/// Piecewise-constant control samples. Step k covers [k dt, (k+1) dt) and
/// holds the envelope value at the step midpoint.
struct PulseSchedule {
  PulseKind kind = PulseKind::kFlux;
  double dt = 0.002;
  std::vector<double> flux;
  std::vector<double> amp;
  double carrier_freq = 0.0;
  double theta = 0.0;
  std::optional<int> target;
  double idle_flux = 0.0;
  double duration = 0.0;  // nominal pulse length; may be shorter than steps() * dt

  Index steps() const { return static_cast<Index>(flux.size()); }
  double time(Index k) const { return static_cast<double>(k) * dt; }
  void validate() const;
};

/// Flat-top envelope in [0, 1] with raised-cosine edges; zero outside the pulse.
double raised_cosine_envelope(double t, double ramp, double flat);

/// ceil(total / dt), guarded against roundoff just above an integer.
Index step_count(double total, double dt);

PulseSchedule make_flux_pulse(double phi_idle, double phi_target, double ramp, double hold,
                              double dt);
PulseSchedule make_drive_pulse(double amp_peak, double ramp, double flat, double carrier_freq,
                               double theta, double dt, int target, double idle_flux = 0.0);

/// The first `steps` steps of a schedule.
PulseSchedule truncate_schedule(const PulseSchedule& schedule, Index steps);

/// Integral of the sampled drive envelope, sum_k amp[k] dt.
double pulse_area(const PulseSchedule& schedule);

struct ModelFamily {
  ModelKind kind = ModelKind::kCircuit;
  DeviceParams params;
  ModelCurves curves;
  TruncationConfig trunc;

  SparseModel at(double phi) const { return assemble_model(kind, params, curves, trunc, phi); }
};

enum class DriveFrame { kLab, kEnvelope };

std::string_view to_string(DriveFrame frame);
DriveFrame parse_drive_frame(std::string_view name);

struct PropagationOptions {
  DriveFrame frame = DriveFrame::kLab;
  bool keep_states = false;
  bool time_reversed = false;  // apply the steps last to first with exp(+i 2 pi dt H)
  double energy_offset = 0.0;  // constant added to every diagonal element
  std::optional<double> frame_flux;  // flux of the computational frame; default idle flux
  Index run_threshold = 16;    // identical-H runs at least this long use one eigensolve
  Index dense_limit = 32;      // dimensions up to this use dense step unitaries
};

/// The per-step Hamiltonians H[k] of a schedule, built lazily.
class StepHamiltonians {
 public:
  StepHamiltonians(ModelFamily family, PulseSchedule schedule, const PropagationOptions& options);

  Index steps() const { return schedule_.steps(); }
  Index dim() const { return total_dim(dims_); }
  const Dims& dims() const { return dims_; }
  const PulseSchedule& schedule() const { return schedule_; }
  const ModelFamily& family() const { return family_; }

  SparseComplexMatrix at(Index k) const;
  /// H at the boundary t_k: mean of the neighbouring steps.
  SparseComplexMatrix at_boundary(Index k) const;
  bool same_as_previous(Index k) const;

  /// Matrix-free sign * H(k) with enclosing spectral bounds.
  struct Operator {
    LinearAction action;
    SpectralBounds bounds;
  };
  Operator op(Index k, double sign = 1.0) const;

 private:
  struct Drift {
    SparseComplexMatrix matrix;
    SpectralBounds bounds;
  };
  const Drift& drift(double phi) const;
  Complex drive_coefficient(Index k) const;
  double diagonal_shift_scale() const;

  ModelFamily family_;
  PulseSchedule schedule_;
  DriveFrame frame_;
  double energy_offset_;
  Dims dims_{};
  SparseComplexMatrix lowering_;
  SparseComplexMatrix raising_;
  double lowering_norm_ = 0.0;
  SparseComplexMatrix number_;
  RealVector number_diag_;
  mutable std::array<std::optional<std::pair<double, Drift>>, 2> cache_;
  mutable int cache_next_ = 0;
};

/// Dressed computational states |00>, |01>, |10>, |11> of a model at one flux.
struct ComputationalFrame {
  ComplexMatrix vectors;  // dim x 4
  std::array<double, 4> energies{};  // relative to the ground state
  std::array<double, 4> overlap{};
};

ComputationalFrame computational_frame(const ModelFamily& family, double phi);

struct Trajectory {
  ModelKind kind = ModelKind::kCircuit;
  Dims dims{};
  std::vector<BasisLabel> labels;
  std::vector<double> times;                          // steps + 1 entries
  std::vector<std::array<Complex, 4>> amplitudes;     // dressed computational frame
  std::vector<ComplexVector> states;                  // only with keep_states
  ComputationalFrame frame;
  double max_norm_defect = 0.0;
  double max_unitarity_defect = 0.0;
  std::shared_ptr<const StepHamiltonians> hamiltonians;

  double dt() const { return hamiltonians->schedule().dt; }
};

Trajectory propagate(const ModelFamily& family, const PulseSchedule& schedule,
                     const ComplexVector& psi0, const PropagationOptions& options = {});

/// Initial state as a combination of the dressed computational states at the frame flux.
ComplexVector computational_state(const ComputationalFrame& frame,
                                  const std::array<Complex, 4>& coefficients);

std::vector<double> leakage_series(const Trajectory& traj);

struct ConditionalPhaseSeries {
  std::array<std::vector<double>, 4> phases;  // unwrapped, ordered 00, 01, 10, 11
  std::vector<double> phi_cz;
};

ConditionalPhaseSeries conditional_phase(const Trajectory& traj);

struct TransferMismatch {
  std::vector<double> transfer_spectator0;  // P(00 -> 01)
  std::vector<double> transfer_spectator1;  // P(10 -> 11)
  std::vector<double> mismatch;
};

TransferMismatch population_transfer_and_mismatch(const Trajectory& spectator0,
                                                  const Trajectory& spectator1);

struct PopulationCurrentRecord {
  std::vector<BasisLabel> tracked;
  std::vector<double> times;
  std::vector<std::vector<double>> populations;   // [tracked][step]
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (m, n) with m < n
  std::vector<std::vector<double>> currents;      // [pair][step], I_{m->n}
  std::vector<std::vector<double>> net_inflow;    // [tracked][step], sum over all states
  double energy_spread = 0.0;                     // of tracked diagonal energies, GHz

  /// Signed I_{m->n} between tracked positions; antisymmetric.
  double current(std::size_t m, std::size_t n, std::size_t step) const;
};

inline constexpr double kTrackedPopulationThreshold = 0.005;

std::vector<BasisLabel> dominant_states(const Trajectory& traj,
                                        double threshold = kTrackedPopulationThreshold);

PopulationCurrentRecord population_currents(const Trajectory& traj,
                                            std::optional<std::vector<BasisLabel>> tracked = {});

struct ContinuityReport {
  double max_error = 0.0;
  double tolerance = 0.0;
  bool ok() const { return max_error <= tolerance; }
};

/// Centered differences of the tracked populations against the net inflow.
ContinuityReport check_continuity(const PopulationCurrentRecord& record);

double cz_duration(double zeta_at_target);

}  // namespace pulsesim
