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

#include "pulsesim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pulsesim/calibration.hpp"
#include "pulsesim/errors.hpp"

namespace pulsesim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void PulseSchedule::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("schedule dt must be positive");
  if (flux.empty()) throw InvalidArgument("schedule needs at least one step");
  if (amp.size() != flux.size()) throw InvalidArgument("schedule flux and amp differ in length");
  if (!all_finite(flux) || !all_finite(amp) || !std::isfinite(carrier_freq) ||
      !std::isfinite(theta)) {
    throw InvalidArgument("schedule samples must be finite");
  }
  if (kind == PulseKind::kFlux &&
      std::any_of(amp.begin(), amp.end(), [](double a) { return a != 0.0; })) {
    throw InvalidArgument("flux pulse carries drive amplitude");
  }
  if (kind == PulseKind::kDrive) {
    if (!target || (*target != 0 && *target != 1)) {
      throw InvalidArgument("drive pulse needs a target qubit 0 or 1");
    }
    if (std::any_of(flux.begin(), flux.end(), [&](double f) { return f != flux.front(); })) {
      throw InvalidArgument("drive pulse flux must be constant");
    }
  }
}

double raised_cosine_envelope(double t, double ramp, double flat) {
  const double total = 2.0 * ramp + flat;
  if (t < 0.0 || t >= total) return 0.0;
  if (t < ramp) return 0.5 * (1.0 - std::cos(std::numbers::pi * t / ramp));
  if (t < ramp + flat) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * (total - t) / ramp));
}

Index step_count(double total, double dt) {
  const double ratio = total / dt;
  return std::max<Index>(1, static_cast<Index>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio))));
}

PulseSchedule make_flux_pulse(double phi_idle, double phi_target, double ramp, double hold,
                              double dt) {
  if (!(ramp >= 0.0) || !(hold > 0.0) || !(dt > 0.0)) {
    throw InvalidArgument("flux pulse needs ramp >= 0, hold > 0, dt > 0");
  }
  PulseSchedule s;
  s.kind = PulseKind::kFlux;
  s.dt = dt;
  s.idle_flux = phi_idle;
  s.duration = 2.0 * ramp + hold;
  const Index k_total = step_count(s.duration, dt);
  s.flux.resize(static_cast<std::size_t>(k_total));
  s.amp.assign(static_cast<std::size_t>(k_total), 0.0);
  for (Index k = 0; k < k_total; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    s.flux[static_cast<std::size_t>(k)] =
        phi_idle + (phi_target - phi_idle) * raised_cosine_envelope(t, ramp, hold);
  }
  s.validate();
  return s;
}

PulseSchedule make_drive_pulse(double amp_peak, double ramp, double flat, double carrier_freq,
                               double theta, double dt, int target, double idle_flux) {
  if (!(amp_peak >= 0.0) || !(ramp >= 0.0) || !(flat >= 0.0) || !(dt > 0.0) ||
      !(2.0 * ramp + flat > 0.0)) {
    throw InvalidArgument("drive pulse needs amp >= 0, ramp >= 0, flat >= 0, dt > 0");
  }
  PulseSchedule s;
  s.kind = PulseKind::kDrive;
  s.dt = dt;
  s.idle_flux = idle_flux;
  s.carrier_freq = carrier_freq;
  s.theta = theta;
  s.target = target;
  s.duration = 2.0 * ramp + flat;
  const Index k_total = step_count(s.duration, dt);
  s.flux.assign(static_cast<std::size_t>(k_total), idle_flux);
  s.amp.resize(static_cast<std::size_t>(k_total));
  for (Index k = 0; k < k_total; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    s.amp[static_cast<std::size_t>(k)] = amp_peak * raised_cosine_envelope(t, ramp, flat);
  }
  s.validate();
  return s;
}

PulseSchedule truncate_schedule(const PulseSchedule& schedule, Index steps) {
  if (steps < 1) throw InvalidArgument("truncated schedule needs at least one step");
  PulseSchedule s = schedule;
  const auto n = static_cast<std::size_t>(std::min(steps, schedule.steps()));
  s.flux.resize(n);
  s.amp.resize(n);
  return s;
}

double pulse_area(const PulseSchedule& schedule) {
  double area = 0.0;
  for (double a : schedule.amp) area += a;
  return area * schedule.dt;
}

std::string_view to_string(DriveFrame frame) {
  return frame == DriveFrame::kLab ? "lab" : "envelope";
}

DriveFrame parse_drive_frame(std::string_view name) {
  if (name == "lab") return DriveFrame::kLab;
  if (name == "envelope") return DriveFrame::kEnvelope;
  throw InvalidArgument("unknown drive frame '" + std::string(name) + "'");
}

StepHamiltonians::StepHamiltonians(ModelFamily family, PulseSchedule schedule,
                                   const PropagationOptions& options)
    : family_(std::move(family)),
      schedule_(std::move(schedule)),
      frame_(options.frame),
      energy_offset_(options.energy_offset) {
  schedule_.validate();
  const SparseModel idle = family_.at(schedule_.idle_flux);
  dims_ = idle.dims;
  const Index n = total_dim(dims_);
  number_.resize(n, n);
  std::vector<Eigen::Triplet<Complex>> diag;
  const std::vector<BasisLabel> labels = product_labels(dims_);
  for (Index i = 0; i < n; ++i) {
    diag.emplace_back(i, i, static_cast<double>(labels[static_cast<std::size_t>(i)].excitations()));
  }
  number_.setFromTriplets(diag.begin(), diag.end());
  number_diag_.resize(n);
  for (Index i = 0; i < n; ++i) number_diag_(i) = number_.coeff(i, i).real();
  if (schedule_.target) {
    lowering_ = drive_operator(idle, *schedule_.target).lowering.sparseView();
    raising_ = lowering_.adjoint();
    lowering_norm_ = max_row_sum(lowering_) + max_row_sum(raising_);
  }
}

const StepHamiltonians::Drift& StepHamiltonians::drift(double phi) const {
  for (const auto& slot : cache_) {
    if (slot && slot->first == phi) return slot->second;
  }
  auto& slot = cache_[static_cast<std::size_t>(cache_next_)];
  cache_next_ = 1 - cache_next_;
  SparseModel model = family_.at(phi);
  if (model.dims != dims_) throw NumericalError("model dimension changed with flux");
  const SpectralBounds bounds = gershgorin_bounds(model.drift);
  slot.emplace(phi, Drift{std::move(model.drift), bounds});
  return slot->second;
}

Complex StepHamiltonians::drive_coefficient(Index k) const {
  if (!schedule_.target) return 0.0;
  const double a = schedule_.amp[static_cast<std::size_t>(k)];
  if (a == 0.0) return 0.0;
  double theta = schedule_.theta;
  double gain = 1.0;
  if (frame_ == DriveFrame::kLab) {
    theta += kTwoPi * schedule_.carrier_freq * (static_cast<double>(k) + 0.5) * schedule_.dt;
    // A carrier frozen over one step drives its resonance at sinc(pi f dt) strength.
    const double x = std::numbers::pi * schedule_.carrier_freq * schedule_.dt;
    if (x != 0.0) gain = x / std::sin(x);
  }
  return -0.5 * a * gain * std::polar(1.0, theta);
}

double StepHamiltonians::diagonal_shift_scale() const {
  return schedule_.target && frame_ == DriveFrame::kEnvelope ? -schedule_.carrier_freq : 0.0;
}

StepHamiltonians::Operator StepHamiltonians::op(Index k, double sign) const {
  const Drift& d = drift(schedule_.flux[static_cast<std::size_t>(k)]);
  const Complex c = drive_coefficient(k);
  const double f = diagonal_shift_scale();
  const double offset = energy_offset_;
  const double nmax = number_diag_.size() ? number_diag_.maxCoeff() : 0.0;

  double lower = d.bounds.lower + offset + std::min(0.0, f * nmax) - std::abs(c) * lowering_norm_;
  double upper = d.bounds.upper + offset + std::max(0.0, f * nmax) + std::abs(c) * lowering_norm_;
  if (sign < 0.0) std::swap(lower, upper), lower = -lower, upper = -upper;

  const SparseComplexMatrix* h = &d.matrix;
  const SparseComplexMatrix* lo = &lowering_;
  const SparseComplexMatrix* hi = &raising_;
  const RealVector* num = &number_diag_;
  LinearAction action = [=](const ComplexVector& v, ComplexVector& out) {
    out.noalias() = *h * v;
    if (c != 0.0) {
      out.noalias() += c * (*lo * v);
      out.noalias() += std::conj(c) * (*hi * v);
    }
    if (f != 0.0) out += f * num->cwiseProduct(v);
    if (offset != 0.0) out += offset * v;
    if (sign < 0.0) out = -out;
  };
  return Operator{std::move(action), SpectralBounds{lower, upper}};
}

SparseComplexMatrix StepHamiltonians::at(Index k) const {
  const auto ks = static_cast<std::size_t>(k);
  SparseComplexMatrix h = drift(schedule_.flux[ks]).matrix;
  if (schedule_.target) {
    if (frame_ == DriveFrame::kEnvelope) h -= schedule_.carrier_freq * number_;
    const Complex c = drive_coefficient(k);
    if (c != 0.0) {
      const SparseComplexMatrix lower = c * lowering_;
      h += lower;
      h += SparseComplexMatrix(lower.adjoint());
    }
  }
  if (energy_offset_ != 0.0) {
    SparseComplexMatrix shift(h.rows(), h.cols());
    shift.setIdentity();
    h += energy_offset_ * shift;
  }
  return h;
}

SparseComplexMatrix StepHamiltonians::at_boundary(Index k) const {
  const Index last = steps() - 1;
  const Index before = std::clamp<Index>(k - 1, 0, last);
  const Index after = std::clamp<Index>(k, 0, last);
  if (before == after) return at(after);
  return 0.5 * (at(before) + at(after));
}

bool StepHamiltonians::same_as_previous(Index k) const {
  if (k <= 0) return false;
  const auto ks = static_cast<std::size_t>(k);
  if (schedule_.flux[ks] != schedule_.flux[ks - 1]) return false;
  const double a0 = schedule_.amp[ks - 1];
  const double a1 = schedule_.amp[ks];
  if (a0 == 0.0 && a1 == 0.0) return true;
  return frame_ == DriveFrame::kEnvelope && a0 == a1;
}

ComputationalFrame computational_frame(const ModelFamily& family, double phi) {
  const ModelHamiltonian model = densify(family.at(phi));
  const Spectrum spectrum = eigh(model.drift);
  const AssignmentMap map = assign_dressed_states(spectrum, model.dims, phi);
  ComputationalFrame frame;
  frame.vectors.resize(spectrum.vectors.rows(), 4);
  for (std::size_t c = 0; c < 4; ++c) {
    frame.vectors.col(static_cast<Index>(c)) = spectrum.vectors.col(map.eigen_index[c]);
    frame.energies[c] = spectrum.energies(map.eigen_index[c]) - spectrum.energies(0);
  }
  frame.overlap = map.overlap;
  return frame;
}

ComplexVector computational_state(const ComputationalFrame& frame,
                                  const std::array<Complex, 4>& coefficients) {
  ComplexVector psi = ComplexVector::Zero(frame.vectors.rows());
  for (std::size_t c = 0; c < 4; ++c) {
    psi += coefficients[c] * frame.vectors.col(static_cast<Index>(c));
  }
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw InvalidArgument("zero initial state");
  return psi / norm;
}

namespace {

class Recorder {
 public:
  Recorder(Trajectory& traj, bool keep_states) : traj_(traj), keep_(keep_states) {}

  void record(double t, const ComplexVector& psi) {
    const ComplexVector amps = traj_.frame.vectors.adjoint() * psi;
    push(t, amps);
    note_norm(psi.norm());
    if (keep_) traj_.states.push_back(psi);
  }

  void push(double t, const ComplexVector& amps) {
    traj_.times.push_back(t);
    traj_.amplitudes.push_back({amps(0), amps(1), amps(2), amps(3)});
  }

  void note_norm(double norm) {
    traj_.max_norm_defect = std::max(traj_.max_norm_defect, std::abs(norm - 1.0));
  }

  void note_unitarity(double defect) {
    traj_.max_unitarity_defect = std::max(traj_.max_unitarity_defect, defect);
  }

  bool keep() const { return keep_; }

 private:
  Trajectory& traj_;
  bool keep_;
};

}  // namespace

Trajectory propagate(const ModelFamily& family, const PulseSchedule& schedule,
                     const ComplexVector& psi0, const PropagationOptions& options) {
  auto hams = std::make_shared<const StepHamiltonians>(family, schedule, options);
  const Index n = hams->dim();
  if (psi0.size() != n) {
    std::ostringstream msg;
    msg << "initial state dimension " << psi0.size() << " does not match model dimension " << n;
    throw InvalidArgument(msg.str());
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw InvalidArgument("initial state must be normalised");

  Trajectory traj;
  traj.kind = family.kind;
  traj.dims = hams->dims();
  traj.labels = product_labels(traj.dims);
  traj.frame = computational_frame(family, options.frame_flux.value_or(schedule.idle_flux));
  traj.hamiltonians = hams;

  const Index k_total = hams->steps();
  const double dt = schedule.dt;
  const double sign = options.time_reversed ? -1.0 : 1.0;
  traj.times.reserve(static_cast<std::size_t>(k_total + 1));
  traj.amplitudes.reserve(static_cast<std::size_t>(k_total + 1));
  if (options.keep_states) traj.states.reserve(static_cast<std::size_t>(k_total + 1));

  Recorder rec(traj, options.keep_states);
  auto step_index = [&](Index p) { return options.time_reversed ? k_total - 1 - p : p; };
  auto time_after = [&](Index p) {
    return options.time_reversed ? static_cast<double>(k_total - 1 - p) * dt
                                 : static_cast<double>(p + 1) * dt;
  };

  ComplexVector psi = psi0;
  rec.record(options.time_reversed ? static_cast<double>(k_total) * dt : 0.0, psi);

  Index p = 0;
  while (p < k_total) {
    // Extent of the run of identical Hamiltonians starting at position p.
    Index end = p + 1;
    while (end < k_total) {
      const Index a = step_index(end - 1);
      const Index b = step_index(end);
      if (!hams->same_as_previous(std::max(a, b))) break;
      ++end;
    }
    const Index run = end - p;
    const Index k0 = step_index(p);
    try {
      if (run >= options.run_threshold || n <= options.dense_limit) {
        const SparseComplexMatrix h = sign * hams->at(k0);
        const Spectrum spectrum = eigh(HermitianOperator(ComplexMatrix(h)));
        if (n <= options.dense_limit) {
          const ComplexMatrix u = unitary_from_spectrum(spectrum, dt);
          rec.note_unitarity(unitarity_defect(u));
          for (Index q = p; q < end; ++q) {
            psi = u * psi;
            rec.record(time_after(q), psi);
          }
        } else {
          rec.note_unitarity(unitarity_defect(spectrum.vectors));
          ComplexVector phases(n);
          for (Index i = 0; i < n; ++i) {
            phases(i) = std::polar(1.0, -kTwoPi * dt * spectrum.energies(i));
          }
          const ComplexMatrix frame_map = traj.frame.vectors.adjoint() * spectrum.vectors;
          ComplexVector c = spectrum.vectors.adjoint() * psi;
          for (Index q = p; q < end; ++q) {
            c = c.cwiseProduct(phases);
            if (rec.keep()) {
              rec.record(time_after(q), spectrum.vectors * c);
            } else {
              rec.push(time_after(q), frame_map * c);
              rec.note_norm(c.norm());
            }
          }
          psi = spectrum.vectors * c;
          rec.note_norm(psi.norm());
        }
      } else {
        for (Index q = p; q < end; ++q) {
          const StepHamiltonians::Operator step = hams->op(step_index(q), sign);
          psi = expm_action(step.action, psi, dt, step.bounds);
          rec.record(time_after(q), psi);
        }
      }
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "propagation failed at step " << k0 << ": " << e.what();
      throw NumericalError(msg.str());
    }
    p = end;
  }
  return traj;
}

std::vector<double> leakage_series(const Trajectory& traj) {
  std::vector<double> out(traj.amplitudes.size(), 0.0);
  if (total_dim(traj.dims) == 4) return out;
  for (std::size_t k = 0; k < out.size(); ++k) {
    double p = 0.0;
    for (const Complex& a : traj.amplitudes[k]) p += std::norm(a);
    out[k] = std::clamp(1.0 - p, 0.0, 1.0);
  }
  return out;
}

ConditionalPhaseSeries conditional_phase(const Trajectory& traj) {
  ConditionalPhaseSeries out;
  const std::size_t steps = traj.amplitudes.size();
  for (auto& p : out.phases) p.resize(steps);
  out.phi_cz.resize(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t s = 0; s < 4; ++s) {
      const Complex a = traj.amplitudes[k][s];
      if (std::abs(a) < 1e-6) {
        std::ostringstream msg;
        msg << "phase undefined at step " << k << " for " << kComputationalLabels[s].to_string();
        throw NumericalError(msg.str());
      }
      const double raw = std::arg(a);
      if (k == 0) {
        out.phases[s][k] = raw;
      } else {
        const double prev = out.phases[s][k - 1];
        out.phases[s][k] = prev + std::remainder(raw - prev, 2.0 * std::numbers::pi);
      }
    }
    out.phi_cz[k] = out.phases[3][k] + out.phases[0][k] - out.phases[1][k] - out.phases[2][k];
  }
  const double origin = steps ? out.phi_cz[0] : 0.0;
  for (double& v : out.phi_cz) v -= origin;
  return out;
}

TransferMismatch population_transfer_and_mismatch(const Trajectory& spectator0,
                                                  const Trajectory& spectator1) {
  const auto& s0 = spectator0.hamiltonians->schedule();
  const auto& s1 = spectator1.hamiltonians->schedule();
  if (s0.dt != s1.dt || s0.flux != s1.flux || s0.amp != s1.amp ||
      s0.carrier_freq != s1.carrier_freq || s0.theta != s1.theta ||
      spectator0.amplitudes.size() != spectator1.amplitudes.size()) {
    throw InvalidArgument("spectator trajectories use different schedules");
  }
  TransferMismatch out;
  const std::size_t steps = spectator0.amplitudes.size();
  for (std::size_t k = 0; k < steps; ++k) {
    const double p0 = std::norm(spectator0.amplitudes[k][1]);
    const double p1 = std::norm(spectator1.amplitudes[k][3]);
    out.transfer_spectator0.push_back(p0);
    out.transfer_spectator1.push_back(p1);
    out.mismatch.push_back(std::abs(p0 - p1));
  }
  return out;
}

double PopulationCurrentRecord::current(std::size_t m, std::size_t n, std::size_t step) const {
  if (m == n) return 0.0;
  const auto key = std::minmax(m, n);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i] == std::pair<std::size_t, std::size_t>(key.first, key.second)) {
      return m < n ? currents[i][step] : -currents[i][step];
    }
  }
  throw InvalidArgument("state pair is not tracked");
}

std::vector<BasisLabel> dominant_states(const Trajectory& traj, double threshold) {
  if (traj.states.empty()) throw InvalidArgument("trajectory has no stored states");
  const Index n = total_dim(traj.dims);
  RealVector max_pop = RealVector::Zero(n);
  for (const ComplexVector& psi : traj.states) max_pop = max_pop.cwiseMax(psi.cwiseAbs2());
  std::vector<BasisLabel> out;
  for (Index i = 0; i < n; ++i) {
    if (max_pop(i) > threshold) out.push_back(traj.labels[static_cast<std::size_t>(i)]);
  }
  std::sort(out.begin(), out.end(), [](const BasisLabel& a, const BasisLabel& b) {
    if (a.excitations() != b.excitations()) return a.excitations() < b.excitations();
    return a < b;
  });
  return out;
}

PopulationCurrentRecord population_currents(const Trajectory& traj,
                                            std::optional<std::vector<BasisLabel>> tracked) {
  if (traj.states.empty()) throw InvalidArgument("trajectory has no stored states");
  PopulationCurrentRecord rec;
  rec.tracked = tracked ? *tracked : dominant_states(traj);
  rec.times = traj.times;
  const std::size_t nt = rec.tracked.size();
  std::vector<Index> idx(nt);
  for (std::size_t i = 0; i < nt; ++i) idx[i] = label_index(traj.dims, rec.tracked[i]);
  for (std::size_t m = 0; m < nt; ++m) {
    for (std::size_t n = m + 1; n < nt; ++n) rec.pairs.emplace_back(m, n);
  }
  const std::size_t steps = traj.states.size();
  rec.populations.assign(nt, std::vector<double>(steps));
  rec.net_inflow.assign(nt, std::vector<double>(steps));
  rec.currents.assign(rec.pairs.size(), std::vector<double>(steps));

  const StepHamiltonians& hams = *traj.hamiltonians;
  for (std::size_t k = 0; k < steps; ++k) {
    const SparseComplexMatrix h = hams.at_boundary(static_cast<Index>(k));
    if (k == 0) {
      double lo = HUGE_VAL;
      double hi = -HUGE_VAL;
      for (Index i : idx) {
        lo = std::min(lo, h.coeff(i, i).real());
        hi = std::max(hi, h.coeff(i, i).real());
      }
      rec.energy_spread = nt ? hi - lo : 0.0;
    }
    const ComplexVector& psi = traj.states[k];
    const ComplexVector hpsi = h * psi;
    for (std::size_t i = 0; i < nt; ++i) {
      rec.populations[i][k] = std::norm(psi(idx[i]));
      rec.net_inflow[i][k] = 2.0 * kTwoPi * std::imag(std::conj(psi(idx[i])) * hpsi(idx[i]));
    }
    for (std::size_t p = 0; p < rec.pairs.size(); ++p) {
      const Index m = idx[rec.pairs[p].first];
      const Index n = idx[rec.pairs[p].second];
      rec.currents[p][k] = 2.0 * kTwoPi * std::imag(std::conj(psi(n)) * h.coeff(n, m) * psi(m));
    }
  }
  return rec;
}

ContinuityReport check_continuity(const PopulationCurrentRecord& record) {
  ContinuityReport report;
  const std::size_t steps = record.times.size();
  if (steps < 3) return report;
  const double dt = record.times[1] - record.times[0];
  double max_rate = 0.0;
  for (const auto& series : record.net_inflow) {
    for (double v : series) max_rate = std::max(max_rate, std::abs(v));
  }
  for (std::size_t i = 0; i < record.tracked.size(); ++i) {
    const auto& p = record.populations[i];
    for (std::size_t k = 1; k + 1 < steps; ++k) {
      const double fd = (p[k + 1] - p[k - 1]) / (2.0 * dt);
      report.max_error = std::max(report.max_error, std::abs(fd - record.net_inflow[i][k]));
    }
  }
  const double x = kTwoPi * record.energy_spread * dt;
  report.tolerance = 5.0 * x * x * max_rate;
  return report;
}

double cz_duration(double zeta_at_target) {
  if (!(std::abs(zeta_at_target) >= 1e-6)) {
    throw CalibrationError("no conditional interaction at target flux");
  }
  return 1.0 / (2.0 * std::abs(zeta_at_target));
}

}  // namespace pulsesim
