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

#include "pulsesim/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "pulsesim/errors.hpp"

namespace pulsesim {

namespace {

std::string model_name(ModelKind kind) { return std::string(to_string(kind)); }

bool keep_row(std::size_t k, std::size_t n, int stride) {
  return k % static_cast<std::size_t>(stride) == 0 || k + 1 == n;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

Index time_index(double t, double dt) { return static_cast<Index>(std::llround(t / dt)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::array<Complex, 4> basis_coefficients(int q1, int q0) {
  std::array<Complex, 4> c{};
  c[static_cast<std::size_t>(2 * q1 + q0)] = 1.0;
  return c;
}

Session::Session(RunConfig config) : config_(std::move(config)) { config_.validate(); }

std::string Session::config_hash() const { return sha256_hex(canonical_config(config_)); }

const std::vector<SweepPoint>& Session::sweep() {
  if (!sweep_) {
    const std::vector<double> grid = config_.flux_grid();
    sweep_ = circuit_sweep(config_.device, config_.truncation, grid);
  }
  return *sweep_;
}

const CalibrationArtifact& Session::calibration() {
  if (artifact_) return *artifact_;
  const auto& points = sweep();
  CalibrationArtifact a;
  a.device = config_.device;
  a.truncation = config_.truncation;
  a.flux_grid = config_.flux_grid();
  a.harmonic_order = config_.sweep.harmonic_order;
  for (const auto& advisory : config_.device.validate()) a.flags.push_back(advisory);

  std::vector<StaticExtraction> extracted;
  for (const auto& p : points) {
    if (p.extraction) {
      extracted.push_back(*p.extraction);
      if (p.assignment.low_overlap) {
        a.flags.push_back("phi=" + std::to_string(p.phi) + ": assignment overlap below 0.7");
      }
    } else {
      a.flags.push_back("phi=" + std::to_string(p.phi) + ": " + p.failure);
    }
  }
  if (extracted.size() < points.size() / 2 + 1) {
    throw CalibrationError("circuit sweep failed at " +
                           std::to_string(points.size() - extracted.size()) + " of " +
                           std::to_string(points.size()) + " flux points");
  }
  EffectiveCalibration eff =
      calibrate_effective(extracted, config_.sweep.harmonic_order, config_.device.omega_c);
  a.effective = eff.curves;
  a.flags.insert(a.flags.end(), eff.flags.begin(), eff.flags.end());
  DuffingCalibration duff = calibrate_duffing(config_.device, config_.truncation, points,
                                              config_.sweep.harmonic_order);
  a.duffing = duff.curves;
  a.flags.insert(a.flags.end(), duff.flags.begin(), duff.flags.end());
  duffing_details_ = std::move(duff);
  artifact_ = std::move(a);
  return *artifact_;
}

void Session::set_calibration(CalibrationArtifact artifact) {
  if (device_hash(artifact.device) != device_hash(config_.device)) {
    throw CalibrationError("calibration artifact was produced for a different device");
  }
  artifact_ = std::move(artifact);
}

ModelFamily Session::family(ModelKind kind) {
  ModelFamily f;
  f.kind = kind;
  f.params = config_.device;
  f.trunc = config_.truncation;
  if (kind != ModelKind::kCircuit) f.curves = calibration().curves();
  return f;
}

CalibrateResult run_calibrate(Session& session) {
  CalibrateResult out;
  out.artifact = session.calibration();
  const auto& a = out.artifact;

  Table residuals{"calibration_residuals", {"quantity", "form", "rms_residual [GHz]"}, {}, {}};
  auto form_of = [](const FluxCurve& c) -> std::string {
    if (std::holds_alternative<HarmonicFit>(c)) return "harmonic";
    return std::get<SurrogateFit>(c).form == SurrogateForm::kOdd ? "surrogate_odd" : "surrogate";
  };
  residuals.add_row({"omega_tilde_q0", "harmonic", a.effective.omega_tilde[0].rms_residual});
  residuals.add_row({"omega_tilde_q1", "harmonic", a.effective.omega_tilde[1].rms_residual});
  residuals.add_row({"J", form_of(a.effective.exchange), rms_residual(a.effective.exchange)});
  residuals.add_row({"zeta", form_of(a.effective.zz), rms_residual(a.effective.zz)});
  residuals.add_row({"duffing_omega_q0", "harmonic", a.duffing.omega[0].rms_residual});
  residuals.add_row({"duffing_omega_q1", "harmonic", a.duffing.omega[1].rms_residual});
  residuals.add_row({"duffing_alpha_q0", "harmonic", a.duffing.alpha[0].rms_residual});
  residuals.add_row({"duffing_alpha_q1", "harmonic", a.duffing.alpha[1].rms_residual});
  residuals.notes = a.flags;
  out.tables.push_back(std::move(residuals));

  if (const auto& duff = session.duffing_details()) {
    Table points{"calibration_duffing_points",
                 {"phi [Phi0]", "stage1_omega_q1 [GHz]", "stage1_alpha_q1 [GHz]",
                  "stage1_omega_q0 [GHz]", "stage1_alpha_q0 [GHz]", "stage1_objective [GHz^2]",
                  "omega_q1 [GHz]", "alpha_q1 [GHz]", "omega_q0 [GHz]", "alpha_q0 [GHz]",
                  "objective [GHz^2]"},
                 {},
                 {}};
    for (std::size_t i = 0; i < duff->refined.size(); ++i) {
      const auto& s = duff->stage1[i];
      const auto& r = duff->refined[i];
      points.add_row({s.phi, s.omega[1], s.alpha[1], s.omega[0], s.alpha[0], s.objective,
                      r.omega[1], r.alpha[1], r.omega[0], r.alpha[0], r.objective});
    }
    out.tables.push_back(std::move(points));
  }
  return out;
}

StaticSweepResult run_static_sweep(Session& session) {
  const auto& points = session.sweep();
  const ModelFamily eff = session.family(ModelKind::kEffective);
  const ModelFamily duff = session.family(ModelKind::kDuffing);

  StaticSweepResult out;
  std::vector<std::string> columns{"phi [Phi0]"};
  for (ModelKind kind : kAllModels) {
    const std::string m = model_name(kind);
    for (const char* q : {"E00", "E01", "E10", "E11", "J", "zeta", "rmse"}) {
      columns.push_back(m + "_" + q + " [GHz]");
    }
  }
  columns.push_back("flag");
  out.table = Table{"static_sweep", columns, {}, {}};

  double sum_eff = 0.0;
  double sum_duff = 0.0;
  int counted = 0;
  bool have_extremum = false;
  for (const auto& p : points) {
    std::vector<Cell> row{p.phi};
    std::string flag;
    std::array<std::optional<StaticExtraction>, 3> ext;
    ext[0] = p.extraction;
    if (!p.extraction) flag = "circuit: " + p.failure;
    const std::array<const ModelFamily*, 2> reduced{&eff, &duff};
    for (std::size_t m = 0; m < 2; ++m) {
      try {
        ext[m + 1] = analyze_static(densify(reduced[m]->at(p.phi))).extraction;
      } catch (const CalibrationError& e) {
        flag += std::string(flag.empty() ? "" : "; ") + model_name(reduced[m]->kind) + ": " + e.what();
      }
    }
    for (std::size_t m = 0; m < 3; ++m) {
      if (!ext[m]) {
        for (int c = 0; c < 7; ++c) row.emplace_back(NAN);
        continue;
      }
      const auto& e = *ext[m];
      for (double v : e.energies) row.emplace_back(v);
      row.emplace_back(e.j_coupling);
      row.emplace_back(e.zeta);
      row.emplace_back(ext[0] ? spectral_rmse(e, *ext[0]) : NAN);
      out.max_abs_j = std::max(out.max_abs_j, std::abs(e.j_coupling));
      out.max_abs_zeta = std::max(out.max_abs_zeta, std::abs(e.zeta));
    }
    if (ext[0] && ext[1] && ext[2]) {
      sum_eff += spectral_rmse(*ext[1], *ext[0]);
      sum_duff += spectral_rmse(*ext[2], *ext[0]);
      ++counted;
    }
    if (ext[0] && (!have_extremum || ext[0]->zeta < out.zeta_extremum_value)) {
      have_extremum = true;
      out.zeta_extremum_value = ext[0]->zeta;
      out.zeta_extremum_phi = p.phi;
    }
    if (!flag.empty()) ++out.flagged_points;
    row.emplace_back(flag);
    out.table.add_row(std::move(row));
  }
  if (counted > 0) {
    out.mean_rmse_effective = sum_eff / counted;
    out.mean_rmse_duffing = sum_duff / counted;
  }
  out.table.notes.push_back("energies relative to the dressed ground state");
  out.table.notes.push_back("rmse over the four computational energies against the circuit model");
  return out;
}

namespace {

struct Metrics {
  double rmse = 0.0;
  double dj = 0.0;
  double dzeta = 0.0;
  int failures = 0;
};

Metrics compare_sweeps(const std::vector<SweepPoint>& trial, const std::vector<SweepPoint>& ref) {
  Metrics m;
  int n = 0;
  for (std::size_t i = 0; i < trial.size(); ++i) {
    if (!trial[i].extraction || !ref[i].extraction) {
      ++m.failures;
      continue;
    }
    m.rmse += spectral_rmse(*trial[i].extraction, *ref[i].extraction);
    m.dj += std::abs(trial[i].extraction->j_coupling - ref[i].extraction->j_coupling);
    m.dzeta += std::abs(trial[i].extraction->zeta - ref[i].extraction->zeta);
    ++n;
  }
  if (n == 0) return {NAN, NAN, NAN, m.failures};
  m.rmse /= n;
  m.dj /= n;
  m.dzeta /= n;
  return m;
}

Table convergence_table(const std::string& axis, const std::vector<ConvergenceRow>& rows) {
  Table t{"truncation_" + axis,
          {"axis", "value", "rmse [GHz]", "abs_dJ [GHz]", "abs_dzeta [GHz]", "failed_points"},
          {},
          {}};
  for (const auto& r : rows) {
    if (r.axis == axis || r.axis == "reference") {
      t.add_row({r.axis, static_cast<long long>(r.value), r.rmse, r.dj, r.dzeta,
                 static_cast<long long>(r.failures)});
    }
  }
  return t;
}

}  // namespace

TruncationResult run_truncation_study(Session& session) {
  const RunConfig& cfg = session.config();
  const auto& conv = cfg.convergence;
  const std::vector<SweepPoint> reference = circuit_sweep(cfg.device, conv.reference, conv.flux);

  TruncationResult out;
  const Metrics self = compare_sweeps(reference, reference);
  out.rows.push_back({"reference", 0, self.rmse, self.dj, self.dzeta, self.failures});

  auto circuit_axis = [&](const std::string& axis, const std::vector<int>& values,
                          int TruncationConfig::*field) {
    for (int v : values) {
      TruncationConfig t = cfg.truncation;
      t.*field = v;
      const Metrics m = compare_sweeps(circuit_sweep(cfg.device, t, conv.flux), reference);
      out.rows.push_back({axis, v, m.rmse, m.dj, m.dzeta, m.failures});
    }
  };
  circuit_axis("n_q", conv.n_q, &TruncationConfig::n_q);
  circuit_axis("n_eq", conv.n_eq, &TruncationConfig::n_eq);
  circuit_axis("n_ec", conv.n_ec, &TruncationConfig::n_ec);

  // Duffing: recalibrated pointwise at each level count against the reference.
  const int order = std::min(cfg.sweep.harmonic_order, (static_cast<int>(conv.flux.size()) - 1) / 2);
  for (int v : conv.n_duff) {
    TruncationConfig t = cfg.truncation;
    t.n_duff = v;
    t.n_duff_coupler = v;
    const DuffingCalibration cal = calibrate_duffing(cfg.device, t, reference, order);
    std::vector<SweepPoint> trial(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
      const auto& est = cal.refined[i];
      trial[i].phi = est.phi;
      try {
        trial[i].extraction =
            analyze_static(densify(assemble_duffing(cfg.device, est.omega, est.alpha, v, v, est.phi)))
                .extraction;
      } catch (const CalibrationError& e) {
        trial[i].failure = e.what();
      }
    }
    const Metrics m = compare_sweeps(trial, reference);
    out.rows.push_back({"n_duff", v, m.rmse, m.dj, m.dzeta, m.failures});
  }

  for (const char* axis : {"n_q", "n_eq", "n_ec", "n_duff"}) {
    Table t = convergence_table(axis, out.rows);
    t.notes.push_back("errors averaged over the study flux subset against the reference truncation");
    out.tables.push_back(std::move(t));
  }
  return out;
}

RxResult run_rx_benchmark(Session& session) {
  const RunConfig& cfg = session.config();
  RxResult out;
  out.frame = cfg.rx.frame;
  out.carrier = cfg.rx.carrier;
  if (!(out.carrier > 0.0)) {
    const StaticAnalysis idle = analyze_static(
        build_hamiltonian(ModelKind::kCircuit, cfg.device, {}, cfg.truncation, cfg.rx.idle_flux));
    out.carrier = idle.extraction.omega_tilde[0];
  }
  out.schedule = make_drive_pulse(cfg.rx.amp, cfg.rx.ramp, cfg.rx.flat(), out.carrier,
                                  cfg.rx.theta, cfg.dt, 0, cfg.rx.idle_flux);
  PropagationOptions opts;
  opts.frame = cfg.rx.frame;

  Table summary{"rx_summary",
                {"model", "frame", "carrier [GHz]", "final_P00_to_01", "final_P10_to_11",
                 "max_mismatch", "max_leakage_spectator0", "max_leakage_spectator1",
                 "max_norm_defect", "max_unitarity_defect", "status"},
                {},
                {}};
  for (ModelKind kind : kAllModels) {
    RxModelResult r{kind, {}, {}, {}, {}, {}, 0.0, 0.0};
    try {
      const ModelFamily family = session.family(kind);
      const ComputationalFrame frame = computational_frame(family, cfg.rx.idle_flux);
      const Trajectory t0 = propagate(family, out.schedule,
                                      computational_state(frame, basis_coefficients(0, 0)), opts);
      const Trajectory t1 = propagate(family, out.schedule,
                                      computational_state(frame, basis_coefficients(1, 0)), opts);
      r.times = t0.times;
      r.transfer = population_transfer_and_mismatch(t0, t1);
      r.leakage_spectator0 = leakage_series(t0);
      r.leakage_spectator1 = leakage_series(t1);
      r.max_norm_defect = std::max(t0.max_norm_defect, t1.max_norm_defect);
      r.max_unitarity_defect = std::max(t0.max_unitarity_defect, t1.max_unitarity_defect);
    } catch (const Error& e) {
      r.failure = e.what();
    }
    const std::string m = model_name(kind);
    if (r.failure.empty()) {
      summary.add_row({m, std::string(to_string(out.frame)), out.carrier,
                       r.transfer.transfer_spectator0.back(), r.transfer.transfer_spectator1.back(),
                       max_of(r.transfer.mismatch), max_of(r.leakage_spectator0),
                       max_of(r.leakage_spectator1), r.max_norm_defect, r.max_unitarity_defect,
                       "ok"});
      Table series{"rx_series_" + m,
                   {"time [ns]", "P00_to_01", "P10_to_11", "mismatch", "leakage_spectator0",
                    "leakage_spectator1"},
                   {},
                   {"drive frame: " + std::string(to_string(out.frame))}};
      const std::size_t n = r.times.size();
      for (std::size_t k = 0; k < n; ++k) {
        if (!keep_row(k, n, cfg.output.stride)) continue;
        series.add_row({r.times[k], r.transfer.transfer_spectator0[k],
                        r.transfer.transfer_spectator1[k], r.transfer.mismatch[k],
                        r.leakage_spectator0[k], r.leakage_spectator1[k]});
      }
      if (kind == ModelKind::kCircuit && out.frame == DriveFrame::kEnvelope) {
        series.notes.push_back(
            "envelope frame is approximate here: the circuit coupling does not conserve "
            "excitation number");
      }
      out.tables.push_back(std::move(series));
    } else {
      summary.add_row({m, std::string(to_string(out.frame)), out.carrier, NAN, NAN, NAN, NAN, NAN,
                       NAN, NAN, r.failure});
    }
    out.models.push_back(std::move(r));
  }
  out.tables.insert(out.tables.begin(), std::move(summary));
  return out;
}

CzResult run_cz_benchmark(Session& session, const CzOptions& options) {
  const RunConfig& cfg = session.config();
  CzResult out;
  out.zeta_target = evaluate(session.calibration().effective.zz, cfg.cz.target_flux);
  out.hold = options.hold ? *options.hold : cz_duration(out.zeta_target);
  out.schedule = make_flux_pulse(cfg.cz.idle_flux, cfg.cz.target_flux, cfg.cz.ramp, out.hold, cfg.dt);
  const Index k_a = time_index(cfg.cz.ramp, cfg.dt);
  const Index k_b = std::min(time_index(cfg.cz.ramp + out.hold, cfg.dt), out.schedule.steps());
  const std::array<Complex, 4> plus{0.5, 0.5, 0.5, 0.5};

  Table summary{"cz_summary",
                {"model", "zeta_target [GHz]", "hold [ns]", "phi_cz_hold [rad]",
                 "phi_cz_final [rad]", "linear_deviation [rad]", "max_leakage", "max_norm_defect",
                 "max_unitarity_defect", "status"},
                {},
                {}};
  for (ModelKind kind : kAllModels) {
    CzModelResult r{kind, {}, {}, {}, {}, {}, 0.0, 0.0, 0.0, 0.0, 0.0};
    try {
      const ModelFamily family = session.family(kind);
      const ComputationalFrame frame = computational_frame(family, cfg.cz.idle_flux);
      const Trajectory traj =
          propagate(family, out.schedule, computational_state(frame, plus), PropagationOptions{});
      r.times = traj.times;
      r.phi_cz = conditional_phase(traj).phi_cz;
      r.leakage = leakage_series(traj);
      r.max_norm_defect = traj.max_norm_defect;
      r.max_unitarity_defect = traj.max_unitarity_defect;
      r.phi_cz_final = r.phi_cz.back();
      // Flat-segment phases are read in the dressed frame of the target flux.
      PropagationOptions at_target;
      at_target.frame_flux = cfg.cz.target_flux;
      const Trajectory held =
          propagate(family, out.schedule, computational_state(frame, plus), at_target);
      r.phi_cz_target_frame = conditional_phase(held).phi_cz;
      r.max_norm_defect = std::max(r.max_norm_defect, held.max_norm_defect);
      r.max_unitarity_defect = std::max(r.max_unitarity_defect, held.max_unitarity_defect);
      const std::vector<double>& flat = r.phi_cz_target_frame;
      r.phi_cz_hold = flat[static_cast<std::size_t>(k_b)] - flat[static_cast<std::size_t>(k_a)];
      // Least-squares line over the flat segment.
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = static_cast<double>(k_b - k_a + 1);
      for (Index k = k_a; k <= k_b; ++k) {
        const double x = static_cast<double>(k - k_a);
        const double y = flat[static_cast<std::size_t>(k)];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double denom = n * sxx - sx * sx;
      const double slope = denom > 0 ? (n * sxy - sx * sy) / denom : 0.0;
      const double icept = (sy - slope * sx) / n;
      for (Index k = k_a; k <= k_b; ++k) {
        const double fit = icept + slope * static_cast<double>(k - k_a);
        r.linear_deviation =
            std::max(r.linear_deviation, std::abs(flat[static_cast<std::size_t>(k)] - fit));
      }
    } catch (const Error& e) {
      r.failure = e.what();
    }
    if (r.failure.empty()) {
      summary.add_row({model_name(kind), out.zeta_target, out.hold, r.phi_cz_hold, r.phi_cz_final,
                       r.linear_deviation, max_of(r.leakage), r.max_norm_defect,
                       r.max_unitarity_defect, "ok"});
    } else {
      summary.add_row({model_name(kind), out.zeta_target, out.hold, NAN, NAN, NAN, NAN, NAN, NAN,
                       r.failure});
    }
    out.models.push_back(std::move(r));
  }

  std::vector<std::string> columns{"time [ns]", "flux [Phi0]"};
  for (ModelKind kind : kAllModels) columns.push_back("phi_cz_" + model_name(kind) + " [rad]");
  for (ModelKind kind : kAllModels) {
    columns.push_back("phi_cz_target_frame_" + model_name(kind) + " [rad]");
  }
  for (ModelKind kind : kAllModels) columns.push_back("leakage_" + model_name(kind));
  Table series{"cz_series",
               columns,
               {},
               {"flux is the step value applied after each time",
                "phi_cz uses the idle-flux dressed frame, phi_cz_target_frame the target-flux one"}};
  const std::size_t n = static_cast<std::size_t>(out.schedule.steps()) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (!keep_row(k, n, cfg.output.stride)) continue;
    std::vector<Cell> row{out.schedule.time(static_cast<Index>(k)),
                          out.schedule.flux[std::min(k, n - 2)]};
    for (const auto& r : out.models) row.emplace_back(r.failure.empty() ? r.phi_cz[k] : NAN);
    for (const auto& r : out.models) {
      row.emplace_back(r.failure.empty() ? r.phi_cz_target_frame[k] : NAN);
    }
    for (const auto& r : out.models) row.emplace_back(r.failure.empty() ? r.leakage[k] : NAN);
    series.add_row(std::move(row));
  }
  out.tables.push_back(std::move(summary));
  out.tables.push_back(std::move(series));
  return out;
}

LeakageResult run_leakage_analysis(Session& session, std::optional<double> hold) {
  const RunConfig& cfg = session.config();
  LeakageResult out;
  out.window = cfg.leakage.window;
  out.early_window = cfg.cz.ramp > 0.0 ? cfg.cz.ramp : cfg.leakage.window / 5.0;
  const double t_hold =
      hold ? *hold : cz_duration(evaluate(session.calibration().effective.zz, cfg.cz.target_flux));
  const PulseSchedule full =
      make_flux_pulse(cfg.cz.idle_flux, cfg.cz.target_flux, cfg.cz.ramp, t_hold, cfg.dt);
  const PulseSchedule schedule = truncate_schedule(full, step_count(cfg.leakage.window, cfg.dt));
  const BasisLabel start{1, 0, 1};

  Table summary{"leakage_summary",
                {"model", "tracked_states", "early_partner", "early_transfer", "max_leakage",
                 "continuity_max_error [1/ns]", "continuity_tolerance [1/ns]", "status"},
                {},
                {"tracked threshold " + std::to_string(cfg.leakage.threshold)}};
  for (ModelKind kind : {ModelKind::kDuffing, ModelKind::kCircuit}) {
    LeakageModelResult r;
    r.kind = kind;
    try {
      const ModelFamily family = session.family(kind);
      const SparseModel idle = family.at(cfg.cz.idle_flux);
      ComplexVector psi0 = ComplexVector::Zero(total_dim(idle.dims));
      psi0(label_index(idle.dims, start)) = 1.0;
      PropagationOptions opts;
      opts.keep_states = true;
      const Trajectory traj = propagate(family, schedule, psi0, opts);
      r.record = population_currents(traj, dominant_states(traj, cfg.leakage.threshold));
      r.continuity = check_continuity(r.record);
      r.max_leakage = max_of(leakage_series(traj));
      r.max_norm_defect = traj.max_norm_defect;
      r.max_unitarity_defect = traj.max_unitarity_defect;

      const auto& tracked = r.record.tracked;
      const auto it = std::find(tracked.begin(), tracked.end(), start);
      if (it != tracked.end()) {
        const auto s = static_cast<std::size_t>(it - tracked.begin());
        const Index k_early = time_index(out.early_window, cfg.dt);
        double best = -1.0;
        for (std::size_t x = 0; x < tracked.size(); ++x) {
          if (x == s) continue;
          double moved = 0.0;
          for (Index k = 0; k < k_early && k + 1 < static_cast<Index>(r.record.times.size()); ++k) {
            const auto ku = static_cast<std::size_t>(k);
            moved += 0.5 * cfg.dt * (r.record.current(s, x, ku) + r.record.current(s, x, ku + 1));
          }
          if (std::abs(moved) > best) {
            best = std::abs(moved);
            r.early_partner = tracked[x];
            r.early_transfer = moved;
          }
        }
      }
    } catch (const Error& e) {
      r.failure = e.what();
    }

    const std::string m = model_name(kind);
    std::string names;
    for (const auto& l : r.record.tracked) names += (names.empty() ? "" : " ") + l.to_string();
    summary.add_row({m, names, r.failure.empty() ? r.early_partner.to_string() : "",
                     r.early_transfer, r.max_leakage, r.continuity.max_error,
                     r.continuity.tolerance,
                     !r.failure.empty()     ? r.failure
                     : r.continuity.ok()    ? std::string("ok")
                                            : std::string("continuity above tolerance")});
    if (r.failure.empty()) {
      const auto& rec = r.record;
      std::vector<std::string> pop_cols{"time [ns]"};
      for (const auto& l : rec.tracked) pop_cols.push_back("P" + l.to_string());
      Table pops{"leakage_populations_" + m, pop_cols, {}, {}};
      std::vector<std::string> cur_cols{"time [ns]"};
      for (const auto& [a, b] : rec.pairs) {
        cur_cols.push_back("I" + rec.tracked[a].to_string() + "->" + rec.tracked[b].to_string() +
                           " [1/ns]");
      }
      Table curs{"leakage_currents_" + m, cur_cols, {}, {"I(m->n) > 0 moves population from m to n"}};
      const std::size_t n = rec.times.size();
      for (std::size_t k = 0; k < n; ++k) {
        if (!keep_row(k, n, cfg.output.stride)) continue;
        std::vector<Cell> prow{rec.times[k]};
        for (const auto& series : rec.populations) prow.emplace_back(series[k]);
        pops.add_row(std::move(prow));
        std::vector<Cell> crow{rec.times[k]};
        for (const auto& series : rec.currents) crow.emplace_back(series[k]);
        curs.add_row(std::move(crow));
      }
      out.tables.push_back(std::move(pops));
      out.tables.push_back(std::move(curs));
    }
    out.models.push_back(std::move(r));
  }
  out.tables.insert(out.tables.begin(), std::move(summary));
  return out;
}

RuntimeResult run_runtime_benchmark(Session& session) {
  const RunConfig& cfg = session.config();
  const double hold =
      cz_duration(evaluate(session.calibration().effective.zz, cfg.cz.target_flux));
  const PulseSchedule schedule =
      make_flux_pulse(cfg.cz.idle_flux, cfg.cz.target_flux, cfg.cz.ramp, hold, cfg.dt);
  std::vector<double> stack{schedule.flux.front()};
  for (double f : schedule.flux) {
    if (f != stack.back()) stack.push_back(f);
  }

  RuntimeResult out;
  out.table = Table{"runtime",
                    {"model", "truncation", "build [s]", "propagation [s]", "dimension"},
                    {},
                    {"median of " + std::to_string(cfg.runtime.repetitions) + " repetitions",
                     "absolute timings are machine specific"}};
  using clock = std::chrono::steady_clock;
  for (int level : cfg.runtime.truncations) {
    for (ModelKind kind : kAllModels) {
      ModelFamily family = session.family(kind);
      if (kind == ModelKind::kCircuit) family.trunc.n_eq = level;
      if (kind == ModelKind::kDuffing) {
        family.trunc.n_duff = level;
        family.trunc.n_duff_coupler = cfg.truncation.n_ec;
      }
      std::vector<double> build;
      std::vector<double> prop;
      Index dim = 0;
      for (int rep = 0; rep < cfg.runtime.repetitions; ++rep) {
        const auto t0 = clock::now();
        for (double f : stack) dim = total_dim(family.at(f).dims);
        const auto t1 = clock::now();
        const ComputationalFrame frame = computational_frame(family, cfg.cz.idle_flux);
        const Trajectory traj =
            propagate(family, schedule, computational_state(frame, {0.5, 0.5, 0.5, 0.5}));
        const auto t2 = clock::now();
        build.push_back(std::chrono::duration<double>(t1 - t0).count());
        prop.push_back(std::chrono::duration<double>(t2 - t1).count());
      }
      RuntimeRow row{kind, level, median(build), median(prop), dim};
      out.table.add_row({model_name(kind), static_cast<long long>(level), row.build_seconds,
                         row.propagation_seconds, static_cast<long long>(row.dimension)});
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace pulsesim
